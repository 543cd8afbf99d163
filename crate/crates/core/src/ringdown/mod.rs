//! Cavity ring-down traces: synthesis, exponential fitting, and conversion
//! of linewidth and free spectral range to finesse.
//!
//! The decay model is `v(t) = v0·exp(−2π·δν·t)` where `δν` is the full width
//! at half maximum of the cavity resonance; the amplitude decay time is
//! `τ = 1/(2π·δν)`.

mod fit;
mod io;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

use crate::quantities::constants::SPEED_OF_LIGHT;
use crate::quantities::{propagate_linear, Dimension, UncertainQuantity};
use crate::{Error, Result};

pub use fit::{fit_ensemble, fit_ringdown, pool_linewidths, AmplitudeMode, EnsembleFit, RingdownFit};
pub use io::{parse_trace_csv, read_trace_csv, write_trace_csv};

pub const MIN_SAMPLES: usize = 16;

/// Time-stamped photodetector samples of a decaying cavity output.
#[derive(Debug, Clone, PartialEq)]
pub struct RingdownTrace {
    samples: Vec<(f64, f64)>,
    trigger_time: f64,
}

impl RingdownTrace {
    /// Builds a trace from `(t_seconds, volts)` pairs. Timestamps must be
    /// strictly increasing and there must be at least [`MIN_SAMPLES`].
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::Trace(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples
            .iter()
            .position(|(t, v)| !(t.is_finite() && v.is_finite()))
        {
            return Err(Error::Trace(format!("sample {i} is not finite")));
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(Error::Trace(format!(
                "timestamps not strictly increasing at sample {}",
                i + 1
            )));
        }
        let trigger_time = samples[0].0;
        Ok(Self {
            samples,
            trigger_time,
        })
    }

    pub fn with_trigger_time(mut self, t: f64) -> Self {
        self.trigger_time = t;
        self
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn trigger_time(&self) -> f64 {
        self.trigger_time
    }

    /// Mean sample rate over the record, Hz.
    pub fn sample_rate(&self) -> f64 {
        let n = self.samples.len();
        (n - 1) as f64 / (self.samples[n - 1].0 - self.samples[0].0)
    }

    /// Same voltages, timestamps translated by `dt`.
    pub fn shifted(&self, dt: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|&(t, v)| (t + dt, v)).collect())
    }

    /// Same timestamps, voltages multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|&(t, v)| (t, v * factor)).collect())
    }
}

/// Generates `v0·exp(−2π·linewidth·t) + N(0, noise_sigma)` sampled at
/// `t = i / sample_rate` for `i` in `0..floor(duration·sample_rate)`.
pub fn synthesize_trace(
    v0: f64,
    linewidth: f64,
    duration: f64,
    sample_rate: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<RingdownTrace> {
    if !(duration > 0.0 && sample_rate > 0.0) {
        return Err(Error::param("duration and sample rate must be positive"));
    }
    if !(linewidth > 0.0) {
        return Err(Error::param("linewidth must be positive"));
    }
    if !(noise_sigma >= 0.0) {
        return Err(Error::param("noise sigma must be non-negative"));
    }
    let n = (duration * sample_rate).floor() as usize;
    if n < MIN_SAMPLES {
        return Err(Error::param(format!(
            "duration·sample_rate = {n} is below {MIN_SAMPLES} samples"
        )));
    }
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| Error::param(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rate = 2.0 * PI * linewidth;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / sample_rate;
            let clean = v0 * (-rate * t).exp();
            let v = if noise_sigma > 0.0 {
                clean + noise.sample(&mut rng)
            } else {
                clean
            };
            (t, v)
        })
        .collect();
    RingdownTrace::new(samples)
}

/// Finesse `ν_FSR / δν` with linear uncertainty propagation.
pub fn finesse(linewidth: &UncertainQuantity, fsr: &UncertainQuantity) -> Result<UncertainQuantity> {
    if linewidth.dimension() != Dimension::Frequency {
        return Err(Error::DimensionMismatch(linewidth.dimension(), Dimension::Frequency));
    }
    if fsr.dimension() != Dimension::Frequency {
        return Err(Error::DimensionMismatch(fsr.dimension(), Dimension::Frequency));
    }
    if !(linewidth.value() > 0.0) {
        return Err(Error::param("linewidth must be positive"));
    }
    if !(fsr.value() > 0.0) {
        return Err(Error::param("free spectral range must be positive"));
    }
    propagate_linear(|x| x[1] / x[0], &[*linewidth, *fsr], Dimension::Dimensionless)
}

/// Plane-wave free spectral range `c / 2d`, Hz.
pub fn fsr_from_length(length: f64) -> Result<f64> {
    if !(length > 0.0) {
        return Err(Error::param("cavity length must be positive"));
    }
    Ok(SPEED_OF_LIGHT / (2.0 * length))
}
