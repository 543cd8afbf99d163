use num_complex::Complex64;
use std::f64::consts::PI;

use super::ComplexIndex;
use crate::quantities::constants::{
    ELECTRON_MASS, ELEMENTARY_CHARGE, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY,
};
use crate::{Error, Result};

/// High-frequency permittivity used when none is supplied.
pub const DEFAULT_EPS_INF: f64 = 3.6;
/// Conduction-band effective mass of ZnO in units of the electron mass.
pub const DEFAULT_EFFECTIVE_MASS_RATIO: f64 = 0.28;

/// Regime thresholds for the `κ ∝ λ³` scaling: `γ/ω` and
/// `ω_p²/(ω²ε_∞)` must both stay below this.
const REGIME_LIMIT: f64 = 0.1;

/// `ε(ω) = ε_∞ − ω_p² / (ω² + iγω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeModel {
    pub eps_inf: f64,
    /// Plasma frequency, rad/s.
    pub plasma_frequency: f64,
    /// Damping rate, rad/s.
    pub damping: f64,
}

impl DrudeModel {
    pub fn new(eps_inf: f64, plasma_frequency: f64, damping: f64) -> Result<Self> {
        if !(eps_inf > 0.0) {
            return Err(Error::param("ε_∞ must be positive"));
        }
        if !(plasma_frequency >= 0.0 && damping >= 0.0) {
            return Err(Error::param("plasma frequency and damping must be non-negative"));
        }
        Ok(Self {
            eps_inf,
            plasma_frequency,
            damping,
        })
    }

    /// Model from transport data: `ω_p² = n e²/(ε₀ m*)`, `γ = e/(m* µ)`.
    ///
    /// `carrier_density` in 1/m³, `mobility` in m²/(V·s), effective mass in
    /// units of the free-electron mass.
    pub fn from_transport(
        eps_inf: f64,
        carrier_density: f64,
        mobility: f64,
        effective_mass_ratio: f64,
    ) -> Result<Self> {
        if !(carrier_density > 0.0 && mobility > 0.0 && effective_mass_ratio > 0.0) {
            return Err(Error::param("carrier density, mobility and mass must be positive"));
        }
        let m = effective_mass_ratio * ELECTRON_MASS;
        let wp = (carrier_density * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE
            / (VACUUM_PERMITTIVITY * m))
            .sqrt();
        Self::new(eps_inf, wp, ELEMENTARY_CHARGE / (m * mobility))
    }

    /// Real and imaginary parts of ε at angular frequency ω.
    pub fn permittivity(&self, omega: f64) -> Complex64 {
        let wp2 = self.plasma_frequency * self.plasma_frequency;
        let g = self.damping;
        let d = omega * omega + g * g;
        let im = wp2 * g / (omega * d);
        Complex64::new(self.eps_inf - wp2 / d, if im > 0.0 { im } else { 0.0 })
    }
}

fn angular_frequency(wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength
}

/// Complex index `√ε` on the principal branch.
pub fn drude_index(model: &DrudeModel, wavelength: f64) -> Result<ComplexIndex> {
    if !(wavelength > 0.0) {
        return Err(Error::param("wavelength must be positive"));
    }
    let n = model.permittivity(angular_frequency(wavelength)).sqrt();
    ComplexIndex::new(n.re.max(0.0), n.im.max(0.0), wavelength)
}

/// Leading-order κ for `γ ≪ ω` and `ω_p² ≪ ε_∞ω²`:
/// `κ ≈ ω_p²γ / (2√ε_∞ ω³)`.
pub fn drude_kappa_first_order(model: &DrudeModel, wavelength: f64) -> f64 {
    let w = angular_frequency(wavelength);
    model.plasma_frequency.powi(2) * model.damping / (2.0 * model.eps_inf.sqrt() * w.powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaCubedRatio {
    /// `κ(2λ)/κ(λ)`; 8 for pure intraband λ³ scaling.
    pub ratio: f64,
    /// False when the free-carrier regime assumptions fail at λ or 2λ.
    pub regime_ok: bool,
}

/// Ratio of Drude extinction at `2λ` and `λ`.
pub fn lambda_cubed_ratio(model: &DrudeModel, wavelength: f64) -> Result<LambdaCubedRatio> {
    let lo = drude_index(model, wavelength)?;
    let hi = drude_index(model, 2.0 * wavelength)?;
    let regime_ok = [wavelength, 2.0 * wavelength].iter().all(|&l| {
        let w = angular_frequency(l);
        model.damping / w < REGIME_LIMIT
            && model.plasma_frequency.powi(2) / (w * w) < REGIME_LIMIT * model.eps_inf
    });
    if !(lo.kappa > 0.0) {
        return Err(Error::Domain("κ(λ) vanishes; ratio undefined".into()));
    }
    Ok(LambdaCubedRatio {
        ratio: hi.kappa / lo.kappa,
        regime_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn omega_model(wavelength: f64, wp_frac: f64, g_frac: f64) -> DrudeModel {
        let w = angular_frequency(wavelength);
        DrudeModel::new(3.6, w * wp_frac, w * g_frac).unwrap()
    }

    #[test]
    fn no_carriers() {
        let m = DrudeModel::new(3.6, 0.0, 1e13).unwrap();
        let n = drude_index(&m, 1650e-9).unwrap();
        assert!((n.n - 3.6f64.sqrt()).abs() < 1e-15);
        assert_eq!(n.kappa, 0.0);
    }

    #[test]
    fn lossless_above_plasma_edge() {
        let m = omega_model(1000e-9, 0.5, 0.0);
        let n = drude_index(&m, 1000e-9).unwrap();
        assert_eq!(n.kappa, 0.0);
        assert!(n.n > 0.0);
    }

    #[test]
    fn metallic_below_plasma_edge() {
        let m = omega_model(1000e-9, 5.0, 0.0);
        let n = drude_index(&m, 1000e-9).unwrap();
        assert_eq!(n.n, 0.0);
        assert!(n.kappa > 0.0);
    }

    #[test]
    fn zno_carriers_at_1650() {
        // ZnO-1 transport, m* = 0.28 mₑ, ε_∞ = 3.6; reference is a 40-digit
        // complex square root of ε.
        let m = DrudeModel::from_transport(3.6, 2e25, 37e-4, 0.28).unwrap();
        let n = drude_index(&m, 1650e-9).unwrap();
        assert!((n.n / 1.851_861_442_545_438 - 1.0).abs() < 1e-12);
        assert!((n.kappa / 6.852_175_443_330_164e-3 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ratio_in_regime() {
        let m = omega_model(1000e-9, 0.1, 0.01);
        let r = lambda_cubed_ratio(&m, 1000e-9).unwrap();
        assert!(r.regime_ok);
        assert!(r.ratio > 7.2 && r.ratio < 8.8, "ratio {}", r.ratio);
    }

    #[test]
    fn ratio_flags_regime_violation() {
        let m = omega_model(1000e-9, 0.1, 1.0);
        assert!(!lambda_cubed_ratio(&m, 1000e-9).unwrap().regime_ok);
    }

    #[test]
    fn first_order_limit() {
        let m = omega_model(1000e-9, 0.01, 1e-4);
        let r = lambda_cubed_ratio(&m, 1000e-9).unwrap();
        assert!((r.ratio / 8.0 - 1.0).abs() < 0.01);
        let exact = drude_index(&m, 1000e-9).unwrap().kappa;
        let approx = drude_kappa_first_order(&m, 1000e-9);
        assert!((approx / exact - 1.0).abs() < 0.01);
        let r1 = drude_kappa_first_order(&m, 2000e-9) / approx;
        assert!((r1 - 8.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn index_squares_to_permittivity(
            eps_inf in 1.0f64..10.0, wp in 0.0f64..5.0, g in 0.0f64..2.0, wl in 300e-9f64..3e-6
        ) {
            let w = angular_frequency(wl);
            let m = DrudeModel::new(eps_inf, wp * w, g * w).unwrap();
            let n = drude_index(&m, wl).unwrap();
            let sq = Complex64::new(n.n, n.kappa).powi(2);
            let eps = m.permittivity(w);
            prop_assert!((sq - eps).norm() <= 1e-12 * eps.norm().max(1e-300));
        }

        #[test]
        fn kappa_shrinks_as_damping_vanishes(wp in 0.01f64..0.5, g in 1e-4f64..0.05) {
            // Transparent side of the plasma edge.
            let wl = 1000e-9;
            let a = omega_model(wl, wp, g);
            let b = omega_model(wl, wp, g * 0.5);
            let ka = drude_index(&a, wl).unwrap().kappa;
            let kb = drude_index(&b, wl).unwrap().kappa;
            prop_assert!(kb <= ka);
        }
    }
}
