//! Stray-field effects on Rydberg atoms: quadratic Stark shift, Ramsey
//! dephasing, and blockade-gate infidelity, with the matching charge
//! budgets for a single charge at distance `x_q`.

use std::f64::consts::PI;

use crate::quantities::constants::{COULOMB, ELEMENTARY_CHARGE};
use crate::{Error, Result};

/// Polarizability stored in ordinary frequency, Hz/(V/m)², so that
/// `δ_R/2π = ½αE²` and `τ_π = 1/(αE²)` both hold.
#[derive(Debug, Clone, PartialEq)]
pub struct RydbergConfig {
    pub polarizability: f64,
    /// Ω_R, rad/s.
    pub two_photon_rabi: f64,
    pub ground_label: String,
    pub rydberg_label: String,
    /// Ground–Rydberg splitting, J. Metadata only.
    pub splitting: Option<f64>,
}

impl RydbergConfig {
    pub const DEFAULT_POLARIZABILITY: f64 = 53.4e3;

    /// Rabi rate in Hz (Ω_R/2π).
    pub fn new(polarizability: f64, rabi_hz: f64) -> Result<Self> {
        if !(polarizability > 0.0 && polarizability.is_finite()) {
            return Err(Error::param("polarizability must be positive"));
        }
        if !(rabi_hz > 0.0 && rabi_hz.is_finite()) {
            return Err(Error::param("Rabi frequency must be positive"));
        }
        Ok(Self {
            polarizability,
            two_photon_rabi: 2.0 * PI * rabi_hz,
            ground_label: "|g⟩".into(),
            rydberg_label: "|r⟩".into(),
            splitting: None,
        })
    }

    /// α = 53.4 kHz/(V/m)², Ω_R/2π = 5 MHz.
    pub fn example() -> Self {
        Self::new(Self::DEFAULT_POLARIZABILITY, 5e6).expect("valid constants")
    }
}

/// `δ_R/2π = ½αE²`, Hz.
pub fn stark_shift(cfg: &RydbergConfig, field: f64) -> f64 {
    0.5 * cfg.polarizability * field * field
}

/// Accumulated phase `παE²τ`, rad.
pub fn dephasing(cfg: &RydbergConfig, field: f64, tau: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::param("duration must be non-negative"));
    }
    Ok(PI * cfg.polarizability * field * field * tau)
}

/// `τ_π = 1/(αE²)`; infinite without a field.
pub fn decoherence_time(cfg: &RydbergConfig, field: f64) -> f64 {
    let rate = cfg.polarizability * field * field;
    if rate == 0.0 {
        f64::INFINITY
    } else {
        1.0 / rate
    }
}

/// `½(δ_R/Ω_R)²` with `shift_hz = δ_R/2π`.
pub fn blockade_infidelity(cfg: &RydbergConfig, shift_hz: f64) -> f64 {
    let r = 2.0 * PI * shift_hz / cfg.two_photon_rabi;
    0.5 * r * r
}

/// Field at the trap centre from `q1` at distance `x_q`, V/m.
fn field_from_charge(q1_e: f64, x_q: f64) -> f64 {
    COULOMB * q1_e * ELEMENTARY_CHARGE / (x_q * x_q)
}

fn charge_from_field(field: f64, x_q: f64) -> f64 {
    field * x_q * x_q / (COULOMB * ELEMENTARY_CHARGE)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RydbergBudget {
    /// e
    pub q1: f64,
    /// V/m
    pub field: f64,
}

/// Charge at distance `x_q` giving the target blockade infidelity.
pub fn max_charge_for_infidelity(
    cfg: &RydbergConfig,
    target: f64,
    x_q: f64,
) -> Result<RydbergBudget> {
    if !(target > 0.0 && target < 0.5) {
        return Err(Error::param("target infidelity must lie in (0, 0.5)"));
    }
    if !(x_q > 0.0) {
        return Err(Error::param("x_q must be positive"));
    }
    let shift_hz = cfg.two_photon_rabi / (2.0 * PI) * (2.0 * target).sqrt();
    let field = (2.0 * shift_hz / cfg.polarizability).sqrt();
    Ok(RydbergBudget {
        q1: charge_from_field(field, x_q),
        field,
    })
}

/// Charge at distance `x_q` for which `τ_π` equals `min_time`.
pub fn max_charge_for_coherence(
    cfg: &RydbergConfig,
    min_time: f64,
    x_q: f64,
) -> Result<RydbergBudget> {
    if !(min_time > 0.0 && x_q > 0.0) {
        return Err(Error::param("coherence time and x_q must be positive"));
    }
    let field = (1.0 / (cfg.polarizability * min_time)).sqrt();
    Ok(RydbergBudget {
        q1: charge_from_field(field, x_q),
        field,
    })
}

/// Field, shift, coherence time and blockade infidelity for one charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RydbergResponse {
    pub field: f64,
    pub shift_hz: f64,
    pub decoherence_time: f64,
    pub infidelity: f64,
}

pub fn rydberg_response(cfg: &RydbergConfig, q1_e: f64, x_q: f64) -> Result<RydbergResponse> {
    if !(x_q > 0.0) {
        return Err(Error::param("x_q must be positive"));
    }
    let field = field_from_charge(q1_e, x_q);
    let shift_hz = stark_shift(cfg, field);
    Ok(RydbergResponse {
        field,
        shift_hz,
        decoherence_time: decoherence_time(cfg, field),
        infidelity: blockade_infidelity(cfg, shift_hz),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const XQ: f64 = 200e-6;

    #[test]
    fn shift_at_quoted_field() {
        let c = RydbergConfig::example();
        let s = stark_shift(&c, 1.9);
        assert!((s - 96.4e3).abs() < 0.1e3, "{s}");
        assert!((s / 100e3 - 1.0).abs() < 0.05);
        assert_eq!(stark_shift(&c, 0.0), 0.0);
        assert!((stark_shift(&c, 3.8) / s - 4.0).abs() < 1e-15);
    }

    #[test]
    fn coherence_at_54e() {
        let c = RydbergConfig::example();
        let r = rydberg_response(&c, 54.0, XQ).unwrap();
        assert!((r.field / 1.9 - 1.0).abs() < 0.05);
        assert!((r.decoherence_time / 5e-6 - 1.0).abs() < 0.05, "{}", r.decoherence_time);
        let phase = dephasing(&c, r.field, r.decoherence_time).unwrap();
        assert!((phase - PI).abs() < 1e-15);
        assert_eq!(dephasing(&c, r.field, 0.0).unwrap(), 0.0);
        assert!(dephasing(&c, 1.0, -1.0).is_err());
        assert_eq!(decoherence_time(&c, 0.0), f64::INFINITY);
    }

    #[test]
    fn infidelity_at_140e() {
        let c = RydbergConfig::example();
        let r = rydberg_response(&c, 140.0, XQ).unwrap();
        assert!((r.infidelity / 0.01 - 1.0).abs() < 0.1, "{}", r.infidelity);
        assert_eq!(blockade_infidelity(&c, 0.0), 0.0);
        assert!((blockade_infidelity(&c, 5e6) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn infidelity_budget() {
        let c = RydbergConfig::example();
        let b = max_charge_for_infidelity(&c, 0.01, XQ).unwrap();
        assert!((b.q1 / 140.0 - 1.0).abs() < 0.05, "{}", b.q1);
        assert!((b.field / 5.1 - 1.0).abs() < 0.05, "{}", b.field);
        let tiny = max_charge_for_infidelity(&c, 1e-12, XQ).unwrap();
        assert!(tiny.q1 < 1.0);
        assert!(max_charge_for_infidelity(&c, 0.5, XQ).is_err());
    }

    proptest! {
        #[test]
        fn infidelity_inverse(target in 1e-6f64..0.49, x in 50e-6f64..1e-3) {
            let c = RydbergConfig::example();
            let b = max_charge_for_infidelity(&c, target, x).unwrap();
            let r = rydberg_response(&c, b.q1, x).unwrap();
            prop_assert!((r.infidelity / target - 1.0).abs() < 1e-9);
        }

        #[test]
        fn coherence_inverse(tau in 1e-9f64..1.0) {
            let c = RydbergConfig::example();
            let b = max_charge_for_coherence(&c, tau, XQ).unwrap();
            let r = rydberg_response(&c, b.q1, XQ).unwrap();
            prop_assert!((r.decoherence_time / tau - 1.0).abs() < 1e-9);
        }

        #[test]
        fn power_laws(q in 1.0f64..1e4, k in 1.1f64..10.0, tau in 1e-9f64..1e-3) {
            let c = RydbergConfig::example();
            let a = rydberg_response(&c, q, XQ).unwrap();
            let b = rydberg_response(&c, k * q, XQ).unwrap();
            let slope = |x: f64, y: f64| (y / x).ln() / k.ln();
            prop_assert!((slope(a.shift_hz, b.shift_hz) - 2.0).abs() < 1e-9);
            prop_assert!((slope(a.infidelity, b.infidelity) - 4.0).abs() < 1e-9);
            let p1 = dephasing(&c, a.field, tau).unwrap();
            let p2 = dephasing(&c, a.field, k * tau).unwrap();
            prop_assert!((slope(p1, p2) - 1.0).abs() < 1e-9);
        }
    }
}
