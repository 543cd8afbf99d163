//! Consequences of stray charge for a trapped ion: displaced equilibrium,
//! shifted secular frequency, excess micromotion and the charge budgets
//! that keep cooling, cavity coupling, Lamb–Dicke operation and two-qubit
//! gates within bounds.

mod bessel;

use std::f64::consts::{PI, SQRT_2};

use crate::electrostatics::{expansion_coefficients, field_at, ChargeScenario};
use crate::quantities::constants::{AMU, ELEMENTARY_CHARGE, HBAR};
use crate::{Error, Result};

pub use bessel::bessel_j0;

/// First zero of J₀.
const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;
/// Upper end of every charge search, in e.
const MAX_SEARCH_CHARGE: f64 = 1e9;
const SEARCH_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    /// kg
    pub mass: f64,
    /// ω_x, rad/s
    pub secular_frequency: f64,
    /// Ω_RF, rad/s
    pub rf_frequency: f64,
    /// Doppler-cooling wavelength, m.
    pub cooling_wavelength: f64,
    /// Gate laser wavelength, m.
    pub gate_wavelength: f64,
    /// Cavity wavelength, m.
    pub cavity_wavelength: f64,
}

impl TrapConfig {
    /// Mass in amu and frequencies in Hz (ω/2π); wavelengths in m.
    pub fn new(
        mass_amu: f64,
        secular_hz: f64,
        rf_hz: f64,
        cooling_wavelength: f64,
        gate_wavelength: f64,
        cavity_wavelength: f64,
    ) -> Result<Self> {
        let vals = [
            mass_amu,
            secular_hz,
            rf_hz,
            cooling_wavelength,
            gate_wavelength,
            cavity_wavelength,
        ];
        if vals.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::param("trap parameters must be positive and finite"));
        }
        if !(rf_hz > secular_hz) {
            return Err(Error::param("RF frequency must exceed the secular frequency"));
        }
        Ok(Self {
            mass: mass_amu * AMU,
            secular_frequency: 2.0 * PI * secular_hz,
            rf_frequency: 2.0 * PI * rf_hz,
            cooling_wavelength,
            gate_wavelength,
            cavity_wavelength,
        })
    }

    /// ¹⁷¹Yb⁺ with ω_x/2π = 500 kHz, Ω_RF/2π = 30 MHz, 369 nm cooling,
    /// 355 nm gates and a 1650 nm cavity.
    pub fn yb171() -> Self {
        Self::new(171.0, 500e3, 30e6, 369e-9, 355e-9, 1650e-9).expect("valid constants")
    }

    /// Trap stiffness `k_t = ½mω_x²`, with `U = k_t x²`.
    pub fn k_t(&self) -> f64 {
        0.5 * self.mass * self.secular_frequency * self.secular_frequency
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    /// Ω_2g, rad/s.
    pub two_qubit_rabi: f64,
    /// Initial motional occupation.
    pub occupation: u32,
    /// Largest acceptable δ_x/Ω_2g.
    pub threshold_ratio: f64,
}

impl GateParams {
    pub const DEFAULT_THRESHOLD: f64 = 0.013;

    /// Rabi rate in Hz (Ω_2g/2π).
    pub fn new(rabi_hz: f64, occupation: u32, threshold_ratio: f64) -> Result<Self> {
        if !(rabi_hz > 0.0 && threshold_ratio > 0.0) {
            return Err(Error::param("gate Rabi rate and threshold must be positive"));
        }
        Ok(Self {
            two_qubit_rabi: 2.0 * PI * rabi_hz,
            occupation,
            threshold_ratio,
        })
    }

    /// Ω_2g/2π = 10 kHz, n_x = 50, threshold 0.013.
    pub fn example() -> Self {
        Self::new(10e3, 50, Self::DEFAULT_THRESHOLD).expect("valid constants")
    }
}

fn stiffness(trap: &TrapConfig, s: &ChargeScenario) -> Result<(f64, f64)> {
    let c = expansion_coefficients(s);
    let k = trap.k_t() + c.s_q * c.b;
    if !(k > 0.0) {
        return Err(Error::Stability(k));
    }
    Ok((k, c.s_q * c.a))
}

/// `x̃ = −½ s_q A / (k_t + s_q B)`, m.
pub fn equilibrium_position(trap: &TrapConfig, s: &ChargeScenario) -> Result<f64> {
    let (k, sa) = stiffness(trap, s)?;
    Ok(-0.5 * sa / k)
}

/// `ω̃_x = √(2(k_t + s_q B)/m)`, rad/s.
pub fn shifted_frequency(trap: &TrapConfig, s: &ChargeScenario) -> Result<f64> {
    let (k, _) = stiffness(trap, s)?;
    Ok((2.0 * k / trap.mass).sqrt())
}

/// `x_µm = √2 (ω̃_x/Ω_RF) x̃`.
pub fn micromotion_amplitude(trap: &TrapConfig, x_eq: f64, shifted: f64) -> f64 {
    SQRT_2 * shifted / trap.rf_frequency * x_eq
}

/// `J₀²(2π x_µm/λ_D)`.
pub fn carrier_intensity_factor(micromotion: f64, cooling_wavelength: f64) -> f64 {
    bessel_j0(2.0 * PI * micromotion / cooling_wavelength).powi(2)
}

/// `√(ħ/(2mω))`, m.
pub fn zero_point_spread(mass: f64, omega: f64) -> Result<f64> {
    if !(mass > 0.0 && omega > 0.0) {
        return Err(Error::param("mass and frequency must be positive"));
    }
    Ok((HBAR / (2.0 * mass * omega)).sqrt())
}

/// Equilibrium, frequency, micromotion and field for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonResponse {
    /// m
    pub x_eq: f64,
    /// rad/s
    pub shifted_frequency: f64,
    /// m
    pub micromotion: f64,
    /// Stray field at the displaced ion, V/m.
    pub field: f64,
}

pub fn ion_response(trap: &TrapConfig, s: &ChargeScenario) -> Result<IonResponse> {
    let x_eq = equilibrium_position(trap, s)?;
    let w = shifted_frequency(trap, s)?;
    Ok(IonResponse {
        x_eq,
        shifted_frequency: w,
        micromotion: micromotion_amplitude(trap, x_eq, w),
        field: field_at(s, x_eq)?,
    })
}

/// Largest single charge `q1` (with `q2 = 0`) tolerated by a constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeBudget {
    /// e
    pub q1_max: f64,
    /// Response at `q1_max`.
    pub response: IonResponse,
}

/// Smallest q1 ≥ 0 with `metric(q1) ≥ target`, for a metric increasing in q1.
fn invert_increasing(
    target: f64,
    what: &str,
    metric: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    if target <= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while metric(hi)? < target {
        lo = hi;
        hi *= 2.0;
        if hi > MAX_SEARCH_CHARGE {
            return Err(Error::Search(format!(
                "{what} not reached for q1 ≤ {MAX_SEARCH_CHARGE:e} e"
            )));
        }
    }
    while hi - lo > SEARCH_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if metric(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn budget_for(
    trap: &TrapConfig,
    x_q: f64,
    target: f64,
    what: &str,
    pick: impl Fn(&IonResponse) -> f64,
) -> Result<ChargeBudget> {
    let respond = |q: f64| ion_response(trap, &ChargeScenario::single(q, x_q)?);
    let q1_max = invert_increasing(target, what, |q| respond(q).map(|r| pick(&r)))?;
    Ok(ChargeBudget {
        q1_max,
        response: respond(q1_max)?,
    })
}

/// Charge at which the cooling-beam carrier intensity falls to
/// `intensity_floor`.
pub fn max_charge_for_cooling(
    trap: &TrapConfig,
    x_q: f64,
    intensity_floor: f64,
) -> Result<ChargeBudget> {
    if !(intensity_floor > 0.0 && intensity_floor < 1.0) {
        return Err(Error::param("intensity floor must lie in (0, 1)"));
    }
    // β on the first lobe where J₀²(β) equals the floor.
    let target = intensity_floor.sqrt();
    let (mut lo, mut hi) = (0.0, J0_FIRST_ZERO);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let beta = 0.5 * (lo + hi);
    let x_um = beta * trap.cooling_wavelength / (2.0 * PI);
    budget_for(trap, x_q, x_um, "cooling intensity floor", |r| r.micromotion)
}

/// Charge at which the ion is displaced by `fraction·λ_c`. With 1/8 the ion
/// moves a quarter period of the standing-wave intensity.
pub fn max_charge_for_coupling(trap: &TrapConfig, x_q: f64, fraction: f64) -> Result<ChargeBudget> {
    if !(fraction > 0.0) {
        return Err(Error::param("displacement fraction must be positive"));
    }
    let target = fraction * trap.cavity_wavelength;
    if target >= 0.5 * x_q {
        return Err(Error::Search(format!(
            "displacement {target:e} m exceeds the x_q/2 reachable with one charge"
        )));
    }
    budget_for(trap, x_q, target, "cavity displacement", |r| r.x_eq)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambDickeBudget {
    /// `limit·λ_g/2π`, m.
    pub micromotion_max: f64,
    /// m
    pub x_eq_max: f64,
    /// e
    pub q1_max: f64,
    /// V/m
    pub field: f64,
}

/// Charge keeping `k_g x_µm` below `modulation_limit`.
pub fn lamb_dicke_budget(
    trap: &TrapConfig,
    x_q: f64,
    modulation_limit: f64,
) -> Result<LambDickeBudget> {
    if !(modulation_limit >= 0.0) {
        return Err(Error::param("modulation limit must be non-negative"));
    }
    let micromotion_max = modulation_limit * trap.gate_wavelength / (2.0 * PI);
    let b = budget_for(trap, x_q, micromotion_max, "Lamb–Dicke limit", |r| r.micromotion)?;
    Ok(LambDickeBudget {
        micromotion_max,
        x_eq_max: b.response.x_eq,
        q1_max: b.q1_max,
        field: b.response.field,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateVerdict {
    /// `|ω_x − ω̃_x|`, rad/s.
    pub delta_x: f64,
    /// `δ_x/Ω_2g`
    pub ratio: f64,
    /// `δ_x/ω_x`
    pub fractional_shift: f64,
    pub within_threshold: bool,
}

pub fn gate_detuning_verdict(
    trap: &TrapConfig,
    s: &ChargeScenario,
    gate: &GateParams,
) -> Result<GateVerdict> {
    let delta_x = (trap.secular_frequency - shifted_frequency(trap, s)?).abs();
    let ratio = delta_x / gate.two_qubit_rabi;
    Ok(GateVerdict {
        delta_x,
        ratio,
        fractional_shift: delta_x / trap.secular_frequency,
        within_threshold: ratio < gate.threshold_ratio,
    })
}

/// Largest `q1 = q2` (e) keeping `δ_x/Ω_2g` at the gate threshold.
pub fn max_symmetric_charge_for_gate(
    trap: &TrapConfig,
    x_q: f64,
    gate: &GateParams,
) -> Result<f64> {
    if !(x_q > 0.0) {
        return Err(Error::param("x_q must be positive"));
    }
    // ω̃² = ω² + 2 s_q B/m with B = 2Q/x_q³.
    let w = trap.secular_frequency;
    let wt = w + gate.threshold_ratio * gate.two_qubit_rabi;
    let s_q = ChargeScenario::single(0.0, x_q)?.s_q();
    let b = trap.mass * (wt * wt - w * w) / (2.0 * s_q);
    Ok(0.5 * b * x_q.powi(3) / ELEMENTARY_CHARGE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const XQ: f64 = 200e-6;

    fn yb() -> TrapConfig {
        TrapConfig::yb171()
    }

    fn pair(q1: f64, q2: f64) -> ChargeScenario {
        ChargeScenario::new(q1, q2, XQ).unwrap()
    }

    #[test]
    fn cooling_boundary_displacement() {
        let x = equilibrium_position(&yb(), &pair(1400.0, 0.0)).unwrap();
        assert!((x / 2.8e-6 - 1.0).abs() < 0.05, "{x}");
    }

    #[test]
    fn coupling_displacement() {
        let x = equilibrium_position(&yb(), &pair(100.0, 0.0)).unwrap();
        assert!((x / (1650e-9 / 8.0) - 1.0).abs() < 0.05, "{x}");
    }

    #[test]
    fn symmetric_charges_do_not_displace() {
        assert_eq!(equilibrium_position(&yb(), &pair(300.0, 300.0)).unwrap(), 0.0);
    }

    #[test]
    fn frequency_shifts() {
        let t = yb();
        assert_eq!(shifted_frequency(&t, &pair(0.0, 0.0)).unwrap(), t.secular_frequency);
        let up = shifted_frequency(&t, &pair(630.0, 630.0)).unwrap();
        let frac = (up - t.secular_frequency) / t.secular_frequency;
        assert!((frac - 0.013).abs() < 0.001, "{frac}");
        let down = shifted_frequency(&t, &pair(-100.0, -100.0)).unwrap();
        assert!(down < t.secular_frequency);
    }

    #[test]
    fn destabilized_trap() {
        let err = equilibrium_position(&yb(), &pair(-1e9, -1e9)).unwrap_err();
        assert!(matches!(err, Error::Stability(k) if k <= 0.0));
    }

    #[test]
    fn micromotion_values() {
        let t = yb();
        let x = micromotion_amplitude(&t, 2.8e-6, 2.0 * PI * 500e3);
        assert!((x - 66.0e-9).abs() < 0.5e-9, "{x}");
        assert_eq!(micromotion_amplitude(&t, 0.0, 1.0), 0.0);
        let ld = micromotion_amplitude(&t, 0.47e-6, 2.0 * PI * 500e3);
        assert!((ld / 11e-9 - 1.0).abs() < 0.05, "{ld}");
    }

    #[test]
    fn intensity_factor() {
        assert_eq!(carrier_intensity_factor(0.0, 369e-9), 1.0);
        let x0 = J0_FIRST_ZERO * 369e-9 / (2.0 * PI);
        assert!(carrier_intensity_factor(x0, 369e-9) < 1e-20);
        let r = ion_response(&yb(), &pair(1400.0, 0.0)).unwrap();
        let f = carrier_intensity_factor(r.micromotion, 369e-9);
        assert!((f / 0.5 - 1.0).abs() < 0.03, "{f}");
    }

    #[test]
    fn cooling_budget() {
        let b = max_charge_for_cooling(&yb(), XQ, 0.5).unwrap();
        assert!((b.q1_max / 1400.0 - 1.0).abs() < 0.05, "{}", b.q1_max);
        assert!((b.response.field / 49.0 - 1.0).abs() < 0.05, "{}", b.response.field);
        assert!((b.response.x_eq / 2.8e-6 - 1.0).abs() < 0.05);
        let f = carrier_intensity_factor(b.response.micromotion, 369e-9);
        assert!((f - 0.5).abs() < 1e-5 * 0.5);
    }

    #[test]
    fn cooling_budget_tight_floor() {
        let b = max_charge_for_cooling(&yb(), XQ, 1.0 - 1e-9).unwrap();
        assert!(b.q1_max < 0.1, "{}", b.q1_max);
        assert!(max_charge_for_cooling(&yb(), XQ, 1.0).is_err());
    }

    #[test]
    fn coupling_budget() {
        let b = max_charge_for_coupling(&yb(), XQ, 0.125).unwrap();
        assert!((b.q1_max / 100.0 - 1.0).abs() < 0.05, "{}", b.q1_max);
        assert!((b.response.field / 3.6 - 1.0).abs() < 0.05, "{}", b.response.field);
        assert!(matches!(max_charge_for_coupling(&yb(), XQ, 1e3), Err(Error::Search(_))));
    }

    #[test]
    fn lamb_dicke() {
        let b = lamb_dicke_budget(&yb(), XQ, 0.2).unwrap();
        assert!((b.x_eq_max / 0.47e-6 - 1.0).abs() < 0.05, "{}", b.x_eq_max);
        assert!((b.micromotion_max / 11e-9 - 1.0).abs() < 0.1);
        assert!((b.q1_max / 230.0 - 1.0).abs() < 0.05, "{}", b.q1_max);
        assert!((b.field / 8.2 - 1.0).abs() < 0.05, "{}", b.field);
        let d = lamb_dicke_budget(&yb(), XQ, 0.4).unwrap();
        assert!((d.micromotion_max / b.micromotion_max - 2.0).abs() < 1e-15);
        let z = lamb_dicke_budget(&yb(), XQ, 0.0).unwrap();
        assert_eq!((z.q1_max, z.x_eq_max, z.field), (0.0, 0.0, 0.0));
    }

    #[test]
    fn zero_point() {
        let t = yb();
        let z = zero_point_spread(t.mass, t.secular_frequency).unwrap();
        assert!((z - 7.7e-9).abs() < 0.05e-9, "{z}");
        let m4 = zero_point_spread(4.0 * t.mass, t.secular_frequency).unwrap();
        let w4 = zero_point_spread(t.mass, 4.0 * t.secular_frequency).unwrap();
        assert!((m4 / z - 0.5).abs() < 1e-15 && (w4 / z - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gate_verdicts() {
        let (t, g) = (yb(), GateParams::example());
        let none = gate_detuning_verdict(&t, &pair(0.0, 0.0), &g).unwrap();
        assert_eq!(none.delta_x, 0.0);
        assert!(none.within_threshold);
        let big = gate_detuning_verdict(&t, &pair(630.0, 630.0), &g).unwrap();
        assert!((big.ratio - 0.65).abs() < 0.02, "{}", big.ratio);
        assert!((big.fractional_shift - 0.013).abs() < 0.001);
        assert!(!big.within_threshold);
        let small = gate_detuning_verdict(&t, &pair(12.0, 12.0), &g).unwrap();
        assert!(small.within_threshold, "{}", small.ratio);
    }

    #[test]
    fn gate_bound() {
        let (t, g) = (yb(), GateParams::example());
        let q = max_symmetric_charge_for_gate(&t, XQ, &g).unwrap();
        assert!((q / 13.0 - 1.0).abs() < 0.1, "{q}");
        let v = gate_detuning_verdict(&t, &pair(q, q), &g).unwrap();
        assert!((v.ratio / g.threshold_ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn config_validation() {
        assert!(TrapConfig::new(171.0, 30e6, 500e3, 369e-9, 355e-9, 1650e-9).is_err());
        assert!(TrapConfig::new(-1.0, 5e5, 3e7, 369e-9, 355e-9, 1650e-9).is_err());
        assert!(GateParams::new(0.0, 50, 0.013).is_err());
    }

    proptest! {
        #[test]
        fn exchange_symmetry(q1 in -500.0f64..2000.0, q2 in -500.0f64..2000.0) {
            let t = yb();
            let a = equilibrium_position(&t, &pair(q1, q2)).unwrap();
            let b = equilibrium_position(&t, &pair(q2, q1)).unwrap();
            prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1e-30));
            let g = GateParams::example();
            let da = gate_detuning_verdict(&t, &pair(q1, q2), &g).unwrap().delta_x;
            let sum = q1 + q2;
            let dc = gate_detuning_verdict(&t, &pair(0.5 * sum, 0.5 * sum), &g).unwrap().delta_x;
            prop_assert!((da - dc).abs() <= 1e-9 * t.secular_frequency);
        }

        #[test]
        fn intensity_factor_bounded(x in 0.0f64..5e-6, wl in 100e-9f64..2e-6) {
            let f = carrier_intensity_factor(x, wl);
            prop_assert!((0.0..=1.0).contains(&f));
        }

        #[test]
        fn cooling_inversion(floor in 0.2f64..0.95) {
            let t = yb();
            let b = max_charge_for_cooling(&t, XQ, floor).unwrap();
            let f = carrier_intensity_factor(b.response.micromotion, t.cooling_wavelength);
            prop_assert!((f / floor - 1.0).abs() < 1e-5);
        }

        #[test]
        fn lamb_dicke_inversion(limit in 0.01f64..1.0) {
            let t = yb();
            let b = lamb_dicke_budget(&t, XQ, limit).unwrap();
            let r = ion_response(&t, &ChargeScenario::single(b.q1_max, XQ).unwrap()).unwrap();
            prop_assert!((r.micromotion / b.micromotion_max - 1.0).abs() < 1e-5);
        }
    }
}
