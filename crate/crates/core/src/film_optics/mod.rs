//! Optical constants of lossy thin films: attenuation in an absorbing
//! medium, the Drude free-carrier model, and Tauc band-gap extraction.

mod drude;
mod io;
mod tauc;

use std::f64::consts::PI;

use crate::quantities::constants::{ELEMENTARY_CHARGE, PLANCK, SPEED_OF_LIGHT};
use crate::{Error, Result};

pub use drude::{
    drude_index, drude_kappa_first_order, lambda_cubed_ratio, DrudeModel, LambdaCubedRatio,
    DEFAULT_EFFECTIVE_MASS_RATIO, DEFAULT_EPS_INF,
};
pub use io::{parse_spectrum_csv, read_spectrum_csv, SpectrumData};
pub use tauc::{tauc_bandgap, AbsorptionSpectrum};

/// Complex refractive index `ñ = n + iκ` at a wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexIndex {
    pub n: f64,
    pub kappa: f64,
    /// Vacuum wavelength, m.
    pub wavelength: f64,
}

impl ComplexIndex {
    pub fn new(n: f64, kappa: f64, wavelength: f64) -> Result<Self> {
        if !(n >= 0.0 && kappa >= 0.0) {
            return Err(Error::param(format!("index ({n}, {kappa}) must be non-negative")));
        }
        if !(wavelength > 0.0) {
            return Err(Error::param("wavelength must be positive"));
        }
        Ok(Self {
            n,
            kappa,
            wavelength,
        })
    }

    /// Power absorption coefficient `4πκ/λ`, 1/m.
    pub fn absorption_coefficient(&self) -> f64 {
        alpha_from_kappa(self.kappa, self.wavelength)
    }
}

/// Fraction of power remaining after a path `z` in a medium with extinction
/// coefficient `κ`: `exp(−4πκz/λ)`.
pub fn power_attenuation(kappa: f64, wavelength: f64, z: f64) -> Result<f64> {
    if !(kappa >= 0.0 && wavelength > 0.0 && z >= 0.0) {
        return Err(Error::param(
            "κ and z must be non-negative and λ positive",
        ));
    }
    Ok((-4.0 * PI * kappa * z / wavelength).exp())
}

/// `α = 4πκ/λ`, 1/m.
pub fn alpha_from_kappa(kappa: f64, wavelength: f64) -> f64 {
    4.0 * PI * kappa / wavelength
}

/// `κ = αλ/4π`.
pub fn kappa_from_alpha(alpha: f64, wavelength: f64) -> f64 {
    alpha * wavelength / (4.0 * PI)
}

/// Photon energy in eV of a vacuum wavelength in m.
pub fn photon_energy_ev(wavelength: f64) -> f64 {
    PLANCK * SPEED_OF_LIGHT / (wavelength * ELEMENTARY_CHARGE)
}

/// Vacuum wavelength in m of a photon energy in eV.
pub fn wavelength_from_energy_ev(energy: f64) -> f64 {
    PLANCK * SPEED_OF_LIGHT / (energy * ELEMENTARY_CHARGE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn transparent_medium() {
        assert_eq!(power_attenuation(0.0, 1550e-9, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn decay_length() {
        let (k, l) = (0.04, 1550e-9);
        let z = l / (4.0 * PI * k);
        assert!((power_attenuation(k, l, z).unwrap() - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn lossy_intracavity_film_limits_finesse() {
        // 10 nm film, κ = 0.04 at 1550 nm, crossed twice per bounce.
        let loss = 1.0 - power_attenuation(0.04, 1550e-9, 20e-9).unwrap();
        assert!((loss - 6.5e-3).abs() < 0.1e-3);
        // Film on one mirror: one lossy bounce per round trip, F = 2π/L.
        let single = 2.0 * PI / loss;
        assert!(single > 500.0 && single < 2000.0, "{single}");
        // Film on both mirrors: F = π/L.
        let both = PI / loss;
        assert!(both > 400.0 && both < 500.0, "{both}");
    }

    #[test]
    fn attenuation_validation() {
        assert!(power_attenuation(-0.1, 1e-6, 1.0).is_err());
        assert!(power_attenuation(0.1, 0.0, 1.0).is_err());
        assert!(ComplexIndex::new(1.5, -1e-3, 1e-6).is_err());
    }

    proptest! {
        #[test]
        fn alpha_kappa_inverse(kappa in 0.0f64..2.0, wl in 200e-9f64..5e-6) {
            let back = kappa_from_alpha(alpha_from_kappa(kappa, wl), wl);
            prop_assert!((back - kappa).abs() <= 1e-15 * kappa.max(1e-300));
        }

        #[test]
        fn energy_wavelength_inverse(wl in 200e-9f64..5e-6) {
            let back = wavelength_from_energy_ev(photon_energy_ev(wl));
            prop_assert!((back / wl - 1.0).abs() < 1e-15);
        }
    }
}
