//! Finesse ↔ mirror reflectivity conversions and extraction of a thin-film
//! extinction coefficient from the finesse drop it causes.
//!
//! Reflectivities here are field amplitude reflectivities `r`; the power
//! reflectance is `r²` and `1 − r²` is transmission plus loss.

use std::f64::consts::PI;

use crate::quantities::{
    propagate_linear, propagate_monte_carlo, Dimension, MonteCarlo, UncertainQuantity,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MirrorLabel {
    /// Bare high reflector.
    M0,
    /// High reflector coated with the ZnO film.
    MZnO,
    /// Bare high reflector after annealing.
    MA,
    Custom(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MirrorState {
    r: f64,
    transmission: f64,
    label: MirrorLabel,
}

impl MirrorState {
    /// `0 < r < 1` and `0 ≤ T ≤ 1 − r²`.
    pub fn new(r: f64, transmission: f64, label: MirrorLabel) -> Result<Self> {
        check_reflectivity(r)?;
        let budget = (1.0 - r) * (1.0 + r);
        if !(transmission >= 0.0 && transmission <= budget * (1.0 + 1e-12)) {
            return Err(Error::param(format!(
                "transmission {transmission:e} outside [0, 1 − r²] = [0, {budget:e}]"
            )));
        }
        Ok(Self {
            r,
            transmission: transmission.min(budget),
            label,
        })
    }

    /// A mirror whose only loss channel is transmission.
    pub fn lossless(r: f64, label: MirrorLabel) -> Result<Self> {
        check_reflectivity(r)?;
        Self::new(r, (1.0 - r) * (1.0 + r), label)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    /// Absorption and scatter `1 − r² − T`.
    pub fn loss(&self) -> f64 {
        ((1.0 - self.r) * (1.0 + self.r) - self.transmission).max(0.0)
    }

    pub fn label(&self) -> &MirrorLabel {
        &self.label
    }
}

/// Two-mirror test cavity with a film on one mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityAssembly {
    pub mirror_a: MirrorState,
    pub mirror_b: MirrorState,
    /// Mirror spacing, m.
    pub length: f64,
    pub fsr: UncertainQuantity,
    pub film_thickness: UncertainQuantity,
    /// Test wavelength, m.
    pub wavelength: f64,
}

impl CavityAssembly {
    pub fn finesse(&self) -> Result<f64> {
        finesse_from_reflectivities(self.mirror_a.r(), self.mirror_b.r())
    }

    pub fn resonant_response(&self) -> ResonantResponse {
        resonant_response(&self.mirror_a, &self.mirror_b)
    }

    /// Extinction coefficient of this assembly's film from a before/after
    /// finesse pair.
    pub fn extinction(
        &self,
        f00: &UncertainQuantity,
        f01: &UncertainQuantity,
        mc: &MonteCarlo,
    ) -> Result<Extinction> {
        extinction_from_finesse(f00, f01, &self.film_thickness, self.wavelength, mc)
    }
}

fn check_reflectivity(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("reflectivity {r} outside (0, 1)")))
    }
}

/// `π√(r_i r_j) / (1 − r_i r_j)`.
pub fn finesse_from_reflectivities(r_i: f64, r_j: f64) -> Result<f64> {
    check_reflectivity(r_i)?;
    check_reflectivity(r_j)?;
    let p = r_i * r_j;
    // 1 − r_i·r_j without cancellation: (1 − r_i) + r_i(1 − r_j).
    let gap = (1.0 - r_i) + r_i * (1.0 - r_j);
    Ok(PI * p.sqrt() / gap)
}

/// `1 − r` for a mirror of a symmetric cavity with finesse `F`, where
/// `r = (√(4F² + π²) − π) / 2F`. Rearranged as
/// `(π + π²/(S + 2F)) / (S + π)` with `S = √(4F² + π²)` so that no
/// cancellation occurs at high finesse.
fn symmetric_loss(f: f64) -> f64 {
    let s = (4.0 * f * f + PI * PI).sqrt();
    (PI + PI * PI / (s + 2.0 * f)) / (s + PI)
}

fn symmetric_r(f: f64) -> f64 {
    1.0 - symmetric_loss(f)
}

fn check_finesse(f: f64, name: &str) -> Result<()> {
    if f > 0.0 && f.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be positive, got {f}")))
    }
}

/// Bare-mirror reflectivity `r₀` from the finesse `F₀₀` of two identical
/// mirrors, with linear uncertainty propagation.
pub fn r0_from_symmetric_finesse(f00: &UncertainQuantity) -> Result<UncertainQuantity> {
    check_finesse(f00.value(), "F00")?;
    propagate_linear(|x| symmetric_r(x[0]), &[*f00], Dimension::Dimensionless)
}

/// `r₁ = g²/r₀` with `g = symmetric_r(F₀₁)`, evaluated as
/// `1 − ((1 − g²) − (1 − r₀))/r₀` to keep the small differences exact.
fn asymmetric_r(f01: f64, r0: f64) -> f64 {
    let dg = symmetric_loss(f01);
    let one_minus_g2 = dg * (2.0 - dg);
    1.0 - (one_minus_g2 - (1.0 - r0)) / r0
}

/// Reflectivity `r₁` of the modified mirror from the finesse `F₀₁` of the
/// `r₀`/`r₁` pair: `r₁ = (1/r₀)·((√(4F₀₁² + π²) − π)/(2F₀₁))²`.
pub fn r1_from_asymmetric_finesse(
    f01: &UncertainQuantity,
    r0: &UncertainQuantity,
) -> Result<UncertainQuantity> {
    check_finesse(f01.value(), "F01")?;
    check_reflectivity(r0.value())?;
    let r1 = asymmetric_r(f01.value(), r0.value());
    if !(r1 > 0.0 && r1 < 1.0) {
        return Err(Error::Consistency(format!(
            "F01 = {} is incompatible with r0 = {}: r1 = {r1} outside (0, 1)",
            f01.value(),
            r0.value()
        )));
    }
    propagate_linear(|x| asymmetric_r(x[0], x[1]), &[*f01, *r0], Dimension::Dimensionless)
}

/// `r₀² − r₁²` from the finesse pair. With `r₁ = g²/r₀` this is
/// `(r₀² − g²)(r₀² + g²)/r₀²`, and `r₀² − g² = (δg − δ₀)(2 − δ₀ − δg)` in
/// terms of the losses `δ = 1 − r`.
fn excess_loss_raw(f00: f64, f01: f64) -> f64 {
    let d0 = symmetric_loss(f00);
    let dg = symmetric_loss(f01);
    let (r0, g) = (1.0 - d0, 1.0 - dg);
    let r0_sq = r0 * r0;
    (dg - d0) * (2.0 - d0 - dg) * (r0_sq + g * g) / r0_sq
}

fn kappa_raw(f00: f64, f01: f64, thickness: f64, wavelength: f64) -> f64 {
    -(wavelength / (8.0 * PI * thickness)) * (-excess_loss_raw(f00, f01)).ln_1p()
}

/// Excess reflection loss `r₀² − r₁²` between the bare and modified mirror.
pub fn excess_reflection_loss(f00: f64, f01: f64) -> Result<f64> {
    check_finesse(f00, "F00")?;
    check_finesse(f01, "F01")?;
    Ok(excess_loss_raw(f00, f01))
}

/// Film extinction coefficient with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extinction {
    /// κ at the nominal inputs; sigma from Monte-Carlo over F₀₀, F₀₁ and h.
    pub kappa: UncertainQuantity,
    /// Mean of the Monte-Carlo samples.
    pub monte_carlo_mean: f64,
    /// First-order propagated sigma, for cross-checking.
    pub linear_sigma: f64,
    /// `r₀² − r₁²` at the nominal inputs.
    pub excess_loss: f64,
    /// Set when F₀₁ > F₀₀: the modified mirror lost less than the bare one
    /// and κ is negative.
    pub loss_decreased: bool,
}

/// Extinction coefficient of a film of thickness `h` on one mirror,
/// attributing all excess loss to double-pass absorption in the film:
/// `κ = −(λ/8πh)·ln(1 − r₀² + r₁²)`.
pub fn extinction_from_finesse(
    f00: &UncertainQuantity,
    f01: &UncertainQuantity,
    thickness: &UncertainQuantity,
    wavelength: f64,
    mc: &MonteCarlo,
) -> Result<Extinction> {
    check_finesse(f00.value(), "F00")?;
    check_finesse(f01.value(), "F01")?;
    if !(thickness.value() > 0.0) {
        return Err(Error::param("film thickness must be positive"));
    }
    if !(wavelength > 0.0) {
        return Err(Error::param("wavelength must be positive"));
    }
    let excess = excess_loss_raw(f00.value(), f01.value());
    if !(1.0 - excess > 0.0) {
        return Err(Error::Domain(format!(
            "1 − r0² + r1² = {} is not positive",
            1.0 - excess
        )));
    }
    let f = move |x: &[f64]| kappa_raw(x[0], x[1], x[2], wavelength);
    let inputs = [*f00, *f01, *thickness];
    let nominal = f(&[f00.value(), f01.value(), thickness.value()]);
    let linear = propagate_linear(f, &inputs, Dimension::Dimensionless)?;
    let sampled = propagate_monte_carlo(f, &inputs, Dimension::Dimensionless, mc)?;
    Ok(Extinction {
        kappa: UncertainQuantity::new(nominal, sampled.quantity.sigma(), Dimension::Dimensionless)?,
        monte_carlo_mean: sampled.quantity.value(),
        linear_sigma: linear.sigma(),
        excess_loss: excess,
        loss_decreased: f01.value() > f00.value(),
    })
}

/// Small-loss expansion of the extinction formula,
/// `κ ≈ (λ/4h)(1/F₀₁ − 1/F₀₀)`; relative error ≈ π/F₀₀.
pub fn extinction_first_order(f00: f64, f01: f64, thickness: f64, wavelength: f64) -> f64 {
    wavelength / (4.0 * thickness) * (1.0 / f01 - 1.0 / f00)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantResponse {
    /// On-resonance power transmission.
    pub transmission: f64,
    /// On-resonance reflected power fraction.
    pub reflection_dip: f64,
}

/// On-resonance power transmission `T_a·T_b/(1 − r_a r_b)²` and reflection
/// `((r_a − r_b(r_a² + T_a))/(1 − r_a r_b))²` for light incident on mirror
/// `a`.
pub fn resonant_response(a: &MirrorState, b: &MirrorState) -> ResonantResponse {
    let gap = (1.0 - a.r) + a.r * (1.0 - b.r);
    let transmission = a.transmission * b.transmission / (gap * gap);
    let amp = (a.r - b.r * (a.r * a.r + a.transmission)) / gap;
    ResonantResponse {
        transmission: transmission.clamp(0.0, 1.0),
        reflection_dip: (amp * amp).clamp(0.0, 1.0),
    }
}
