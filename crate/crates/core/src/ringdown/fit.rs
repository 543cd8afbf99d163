use std::f64::consts::PI;

use super::RingdownTrace;
use crate::exec::Backend;
use crate::quantities::{Dimension, UncertainQuantity};
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 100;
const RELATIVE_STEP_TOLERANCE: f64 = 1e-10;
/// Samples at or below this multiple of the noise floor are excluded from
/// the log-linear seed.
const SEED_CLIP_FACTOR: f64 = 3.0;
/// Required peak-to-noise ratio.
const MIN_PEAK_TO_NOISE: f64 = 5.0;
/// Converts a median absolute deviation to a Gaussian sigma.
const MAD_TO_SIGMA: f64 = 1.482_602_218_505_602;

/// Least-squares estimate of `v(t) = v0·exp(−2π·δν·t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingdownFit {
    /// Amplitude at `t = 0`, in the trace's voltage units.
    pub v0: UncertainQuantity,
    /// Full width at half maximum `δν`, Hz.
    pub linewidth: UncertainQuantity,
    pub residual_rms: f64,
    pub iterations: usize,
}

impl RingdownFit {
    /// Amplitude decay time `1/(2π·δν)`, s.
    pub fn decay_time(&self) -> f64 {
        1.0 / (2.0 * PI * self.linewidth.value())
    }
}

/// Whether the initial amplitude is a free parameter of every trace or a
/// single parameter shared by all traces of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmplitudeMode {
    #[default]
    PerTrace,
    Joint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleFit {
    pub mode: AmplitudeMode,
    /// One fit per trace, or a single joint fit.
    pub fits: Vec<RingdownFit>,
    /// Pooled linewidth, Hz.
    pub linewidth: UncertainQuantity,
    /// `√(χ²/(N−1))` of the per-trace linewidths about the pooled value;
    /// 1 when undefined.
    pub birge_ratio: f64,
}

/// Robust noise estimate from the trailing quarter of the record:
/// `1.4826 · median(|v|)` (the model has no baseline).
fn trailing_noise(samples: &[(f64, f64)]) -> f64 {
    let tail = (samples.len() / 4).max(8).min(samples.len());
    let mut mags: Vec<f64> = samples[samples.len() - tail..]
        .iter()
        .map(|&(_, v)| v.abs())
        .collect();
    mags.sort_by(f64::total_cmp);
    let mid = mags.len() / 2;
    let median = if mags.len().is_multiple_of(2) {
        0.5 * (mags[mid - 1] + mags[mid])
    } else {
        mags[mid]
    };
    MAD_TO_SIGMA * median
}

/// Weighted regression of `ln v` on `t − t_ref` over samples above the clip
/// threshold; weights `v²` approximate inverse variances of `ln v`.
fn log_linear_seed(points: &[(f64, f64)], t_ref: f64, clip: f64) -> Option<(f64, f64)> {
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut count = 0;
    for &(t, v) in points {
        if v > clip && v > 0.0 {
            let (x, y, w) = (t - t_ref, v.ln(), v * v);
            sw += w;
            sx += w * x;
            sy += w * y;
            sxx += w * x * x;
            sxy += w * x * y;
            count += 1;
        }
    }
    if count < 3 {
        return None;
    }
    let det = sw * sxx - sx * sx;
    if !(det > 0.0) {
        return None;
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / sw;
    Some((intercept.exp(), -slope))
}

struct Solution {
    amplitude: f64,
    rate: f64,
    /// Covariance of (amplitude, rate).
    cov: [[f64; 2]; 2],
    rss: f64,
    iterations: usize,
}

/// Damped Gauss–Newton (Levenberg–Marquardt) on `a·exp(−k·(t − t_ref))`.
///
/// Time is rescaled by the record span internally for conditioning.
fn solve(points: &[(f64, f64)], t_ref: f64, a0: f64, k0: f64) -> Result<Solution> {
    let span = points
        .iter()
        .map(|&(t, _)| t - t_ref)
        .fold(0.0_f64, f64::max);
    if !(span > 0.0) {
        return Err(Error::Fit("record has zero time span".into()));
    }
    let u: Vec<f64> = points.iter().map(|&(t, _)| (t - t_ref) / span).collect();
    let y: Vec<f64> = points.iter().map(|&(_, v)| v).collect();

    // Normal equations at (a, s) with s = k·span.
    let normal = |a: f64, s: f64| {
        let (mut jtj, mut jtr, mut rss) = ([[0.0; 2]; 2], [0.0; 2], 0.0);
        for (&ui, &yi) in u.iter().zip(&y) {
            let e = (-s * ui).exp();
            let r = yi - a * e;
            let j = [e, -a * ui * e];
            jtj[0][0] += j[0] * j[0];
            jtj[0][1] += j[0] * j[1];
            jtj[1][1] += j[1] * j[1];
            jtr[0] += j[0] * r;
            jtr[1] += j[1] * r;
            rss += r * r;
        }
        jtj[1][0] = jtj[0][1];
        (jtj, jtr, rss)
    };
    let rss_at = |a: f64, s: f64| {
        u.iter()
            .zip(&y)
            .map(|(&ui, &yi)| (yi - a * (-s * ui).exp()).powi(2))
            .sum::<f64>()
    };

    let (mut a, mut s) = (a0, k0 * span);
    let mut lambda = 1e-3;
    let (mut jtj, mut jtr, mut rss) = normal(a, s);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let m = [
            [jtj[0][0] * (1.0 + lambda), jtj[0][1]],
            [jtj[1][0], jtj[1][1] * (1.0 + lambda)],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det.is_finite() && det != 0.0) {
            break;
        }
        let da = (m[1][1] * jtr[0] - m[0][1] * jtr[1]) / det;
        let ds = (m[0][0] * jtr[1] - m[1][0] * jtr[0]) / det;
        let change = (da / a).abs().max((ds / s).abs());
        let (ta, ts) = (a + da, s + ds);
        let trial = rss_at(ta, ts);
        if trial.is_finite() && trial <= rss {
            a = ta;
            s = ts;
            lambda = (lambda * 0.1).max(1e-15);
            (jtj, jtr, rss) = normal(a, s);
        } else {
            lambda *= 10.0;
        }
        if change < RELATIVE_STEP_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged || !(a.is_finite() && s.is_finite()) {
        return Err(Error::FitNotConverged {
            iterations,
            v0: a,
            linewidth_hz: s / span / (2.0 * PI),
        });
    }

    let dof = points.len().saturating_sub(2).max(1) as f64;
    let s2 = rss / dof;
    let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
    let inv = [
        [jtj[1][1] / det, -jtj[0][1] / det],
        [-jtj[1][0] / det, jtj[0][0] / det],
    ];
    let cov = [
        [s2 * inv[0][0], s2 * inv[0][1] / span],
        [s2 * inv[1][0] / span, s2 * inv[1][1] / (span * span)],
    ];
    Ok(Solution {
        amplitude: a,
        rate: s / span,
        cov,
        rss,
        iterations,
    })
}

fn to_fit(sol: Solution, t_ref: f64, n: usize) -> Result<RingdownFit> {
    if !(sol.rate > 0.0) {
        return Err(Error::Fit(format!(
            "fitted linewidth {} Hz is not positive",
            sol.rate / (2.0 * PI)
        )));
    }
    // v0 = a·exp(k·t_ref)
    let g = (sol.rate * t_ref).exp();
    let (da, dk) = (g, sol.amplitude * t_ref * g);
    let var_v0 = da * da * sol.cov[0][0] + 2.0 * da * dk * sol.cov[0][1] + dk * dk * sol.cov[1][1];
    let two_pi = 2.0 * PI;
    Ok(RingdownFit {
        v0: UncertainQuantity::new(
            sol.amplitude * g,
            var_v0.max(0.0).sqrt(),
            Dimension::Dimensionless,
        )?,
        linewidth: UncertainQuantity::new(
            sol.rate / two_pi,
            sol.cov[1][1].max(0.0).sqrt() / two_pi,
            Dimension::Frequency,
        )?,
        residual_rms: (sol.rss / n as f64).sqrt(),
        iterations: sol.iterations,
    })
}

/// Fits one ring-down trace.
///
/// Seeds from a log-linear regression of the samples above three times the
/// trailing noise floor, then refines by damped Gauss–Newton until the
/// relative parameter step drops below 1e-10 (at most 100 iterations).
/// Parameter sigmas come from the least-squares covariance.
pub fn fit_ringdown(trace: &RingdownTrace) -> Result<RingdownFit> {
    let samples = trace.samples();
    let noise = trailing_noise(samples);
    let peak = samples
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(peak > MIN_PEAK_TO_NOISE * noise) {
        return Err(Error::Fit(format!(
            "peak {peak:e} is not above {MIN_PEAK_TO_NOISE}× the trailing noise {noise:e}"
        )));
    }
    let t_ref = samples[0].0;
    let (a0, k0) = log_linear_seed(samples, t_ref, SEED_CLIP_FACTOR * noise)
        .ok_or_else(|| Error::Fit("too few samples above the noise floor to seed".into()))?;
    let sol = solve(samples, t_ref, a0, k0)?;
    to_fit(sol, t_ref, samples.len())
}

/// Inverse-variance pooled linewidth and Birge ratio. When the per-trace
/// scatter exceeds the stated sigmas the pooled sigma is inflated by the
/// Birge ratio.
pub fn pool_linewidths(fits: &[RingdownFit]) -> Result<(UncertainQuantity, f64)> {
    if fits.is_empty() {
        return Err(Error::param("no fits to pool"));
    }
    let exact: Vec<f64> = fits
        .iter()
        .filter(|f| f.linewidth.sigma() == 0.0)
        .map(|f| f.linewidth.value())
        .collect();
    if !exact.is_empty() {
        let mean = exact.iter().sum::<f64>() / exact.len() as f64;
        return Ok((UncertainQuantity::exact(mean, Dimension::Frequency), 1.0));
    }
    let (mut sw, mut swx) = (0.0, 0.0);
    for f in fits {
        let w = f.linewidth.sigma().powi(-2);
        sw += w;
        swx += w * f.linewidth.value();
    }
    let mean = swx / sw;
    let internal = sw.powf(-0.5);
    let birge = if fits.len() > 1 {
        let chi2: f64 = fits
            .iter()
            .map(|f| ((f.linewidth.value() - mean) / f.linewidth.sigma()).powi(2))
            .sum();
        (chi2 / (fits.len() - 1) as f64).sqrt()
    } else {
        1.0
    };
    Ok((
        UncertainQuantity::new(mean, internal * birge.max(1.0), Dimension::Frequency)?,
        birge,
    ))
}

/// Fits several successive traces. In [`AmplitudeMode::Joint`] a single
/// amplitude and linewidth are fitted to all samples at once.
pub fn fit_ensemble(
    traces: &[RingdownTrace],
    mode: AmplitudeMode,
    backend: Backend,
) -> Result<EnsembleFit> {
    if traces.is_empty() {
        return Err(Error::param("no traces"));
    }
    match mode {
        AmplitudeMode::PerTrace => {
            let fits = backend
                .map(traces, fit_ringdown)
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let (linewidth, birge_ratio) = pool_linewidths(&fits)?;
            Ok(EnsembleFit {
                mode,
                fits,
                linewidth,
                birge_ratio,
            })
        }
        AmplitudeMode::Joint => {
            let points: Vec<(f64, f64)> = traces
                .iter()
                .flat_map(|t| t.samples().iter().copied())
                .collect();
            let t_ref = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            let mut seed_points = Vec::new();
            for tr in traces {
                let clip = SEED_CLIP_FACTOR * trailing_noise(tr.samples());
                seed_points.extend(tr.samples().iter().copied().filter(|&(_, v)| v > clip));
            }
            let (a0, k0) = log_linear_seed(&seed_points, t_ref, 0.0)
                .ok_or_else(|| Error::Fit("too few samples above the noise floor".into()))?;
            let fit = to_fit(solve(&points, t_ref, a0, k0)?, t_ref, points.len())?;
            Ok(EnsembleFit {
                mode,
                fits: vec![fit],
                linewidth: fit.linewidth,
                birge_ratio: 1.0,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ringdown::synthesize_trace;

    const LW: f64 = 523e3;

    fn noisy(seed: u64) -> RingdownTrace {
        synthesize_trace(1.0, LW, 2e-6, 5e9, 0.01, seed).unwrap()
    }

    #[test]
    fn noiseless_recovery() {
        let tr = synthesize_trace(1.0, LW, 2e-6, 1e9, 0.0, 0).unwrap();
        let fit = fit_ringdown(&tr).unwrap();
        assert!((fit.linewidth.value() / LW - 1.0).abs() < 1e-6);
        assert!((fit.v0.value() - 1.0).abs() < 1e-6);
        assert!(fit.linewidth.sigma() < 1e-6 * LW);
    }

    #[test]
    fn noisy_recovery_within_three_sigma() {
        let fit = fit_ringdown(&noisy(1)).unwrap();
        let dev = fit.linewidth.value() - LW;
        assert!(dev.abs() / LW < 0.02);
        assert!(dev.abs() < 3.0 * fit.linewidth.sigma());
        assert!((fit.residual_rms / 0.01 - 1.0).abs() < 0.05);
    }

    #[test]
    fn shift_invariance() {
        let tr = noisy(3);
        let t0 = 3.7e-7;
        let a = fit_ringdown(&tr).unwrap();
        let b = fit_ringdown(&tr.shifted(t0).unwrap()).unwrap();
        assert!((b.linewidth.value() / a.linewidth.value() - 1.0).abs() < 1e-9);
        let expected_v0 = a.v0.value() * (2.0 * PI * a.linewidth.value() * t0).exp();
        assert!((b.v0.value() / expected_v0 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn scale_invariance() {
        let tr = noisy(4);
        let a = fit_ringdown(&tr).unwrap();
        let b = fit_ringdown(&tr.scaled(250.0).unwrap()).unwrap();
        assert!((b.linewidth.value() / a.linewidth.value() - 1.0).abs() < 1e-9);
        assert!((b.v0.value() / (250.0 * a.v0.value()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pure_noise_is_rejected() {
        let flat = synthesize_trace(0.0, LW, 2e-6, 1e9, 0.01, 2).unwrap();
        assert!(matches!(fit_ringdown(&flat), Err(Error::Fit(_))));
    }

    #[test]
    fn rising_trace_is_rejected() {
        let samples: Vec<_> = (0..200)
            .map(|i| {
                let t = i as f64 * 1e-8;
                (t, 0.01 * (2.0 * PI * LW * t).exp())
            })
            .collect();
        let tr = RingdownTrace::new(samples).unwrap();
        assert!(fit_ringdown(&tr).is_err());
    }

    #[test]
    fn ensemble_modes_agree() {
        let traces: Vec<_> = (10..16).map(noisy).collect();
        let per = fit_ensemble(&traces, AmplitudeMode::PerTrace, Backend::default()).unwrap();
        let joint = fit_ensemble(&traces, AmplitudeMode::Joint, Backend::default()).unwrap();
        assert_eq!(per.fits.len(), 6);
        assert_eq!(joint.fits.len(), 1);
        assert!((per.linewidth.value() / LW - 1.0).abs() < 0.01);
        assert!((joint.linewidth.value() / LW - 1.0).abs() < 0.01);
        assert!((per.linewidth.value() - joint.linewidth.value()).abs() < 3.0 * per.linewidth.sigma());
    }

    #[test]
    fn pooling_inflates_by_birge_ratio() {
        let mk = |v: f64| RingdownFit {
            v0: UncertainQuantity::exact(1.0, Dimension::Dimensionless),
            linewidth: UncertainQuantity::new(v, 1.0, Dimension::Frequency).unwrap(),
            residual_rms: 0.0,
            iterations: 1,
        };
        let (p, b) = pool_linewidths(&[mk(0.0), mk(10.0)]).unwrap();
        assert_eq!(p.value(), 5.0);
        assert!((b - 50f64.sqrt()).abs() < 1e-12);
        assert!((p.sigma() - 5.0).abs() < 1e-12);
    }
}
