use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Dimension, UncertainQuantity};
use crate::exec::Backend;
use crate::{Error, Result};

/// Samples drawn per RNG stream. Fixed so that the partitioning, and hence
/// every draw, is independent of the backend and thread count.
const CHUNK: usize = 4096;

/// Largest tolerated fraction of non-finite Monte-Carlo samples.
const MAX_NON_FINITE_FRACTION: f64 = 0.01;

/// Linear (first-order) propagation with central finite-difference
/// derivatives, step `max(1e-6·|x|, 1e-12)`.
///
/// Inputs with zero sigma are not differentiated.
pub fn propagate_linear<F>(
    f: F,
    inputs: &[UncertainQuantity],
    dimension: Dimension,
) -> Result<UncertainQuantity>
where
    F: Fn(&[f64]) -> f64,
{
    let mut x: Vec<f64> = inputs.iter().map(|q| q.value()).collect();
    let value = f(&x);
    if !value.is_finite() {
        return Err(Error::Evaluation(format!(
            "function is not finite at the inputs {x:?}"
        )));
    }
    let mut variance = 0.0;
    for (i, q) in inputs.iter().enumerate() {
        if q.sigma() == 0.0 {
            continue;
        }
        let xi = x[i];
        let step = (1e-6 * xi.abs()).max(1e-12);
        x[i] = xi + step;
        let up = f(&x);
        x[i] = xi - step;
        let down = f(&x);
        x[i] = xi;
        if !(up.is_finite() && down.is_finite()) {
            return Err(Error::Evaluation(format!(
                "function is not finite on the stencil of input {i}"
            )));
        }
        let derivative = (up - down) / (2.0 * step);
        variance += (derivative * q.sigma()).powi(2);
    }
    UncertainQuantity::new(value, variance.sqrt(), dimension)
}

/// Monte-Carlo configuration. The seed is always explicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
    pub backend: Backend,
}

impl MonteCarlo {
    pub const MIN_SAMPLES: usize = 1000;

    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            backend: Backend::default(),
        }
    }

    pub fn with_backend(self, backend: Backend) -> Self {
        Self { backend, ..self }
    }
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self::new(100_000, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloOutcome {
    pub quantity: UncertainQuantity,
    /// Samples for which `f` was not finite; they are excluded from the
    /// mean and standard deviation.
    pub non_finite: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
    non_finite: usize,
}

impl Moments {
    fn push(&mut self, v: f64) {
        if !v.is_finite() {
            self.non_finite += 1;
            return;
        }
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return Moments {
                non_finite: self.non_finite + other.non_finite,
                ..other
            };
        }
        if other.n == 0 {
            return Moments {
                non_finite: self.non_finite + other.non_finite,
                ..self
            };
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = if self.mean == other.mean {
            self.mean
        } else {
            self.mean + delta * other.n as f64 / n as f64
        };
        Moments {
            n,
            mean,
            m2: self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64,
            non_finite: self.non_finite + other.non_finite,
        }
    }
}

/// Monte-Carlo propagation with independent normal draws per input.
///
/// Returns the sample mean and sample standard deviation of `f`. The result
/// is bit-identical for a fixed seed and sample count, whatever the backend.
pub fn propagate_monte_carlo<F>(
    f: F,
    inputs: &[UncertainQuantity],
    dimension: Dimension,
    mc: &MonteCarlo,
) -> Result<MonteCarloOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    if mc.samples < MonteCarlo::MIN_SAMPLES {
        return Err(Error::param(format!(
            "Monte-Carlo needs at least {} samples, got {}",
            MonteCarlo::MIN_SAMPLES,
            mc.samples
        )));
    }
    let chunks = mc.samples.div_ceil(CHUNK);
    let partial = mc.backend.map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
        rng.set_stream(c as u64);
        let len = CHUNK.min(mc.samples - c * CHUNK);
        let mut x = vec![0.0; inputs.len()];
        let mut m = Moments::default();
        for _ in 0..len {
            for (xi, q) in x.iter_mut().zip(inputs) {
                let z: f64 = StandardNormal.sample(&mut rng);
                *xi = if q.sigma() == 0.0 {
                    q.value()
                } else {
                    q.value() + q.sigma() * z
                };
            }
            m.push(f(&x));
        }
        m
    });
    let total = partial
        .into_iter()
        .fold(Moments::default(), Moments::merge);

    if total.non_finite as f64 > MAX_NON_FINITE_FRACTION * mc.samples as f64 {
        return Err(Error::Evaluation(format!(
            "{} of {} Monte-Carlo samples were not finite",
            total.non_finite, mc.samples
        )));
    }
    if total.n < 2 {
        return Err(Error::Evaluation("too few finite samples".into()));
    }
    let sigma = (total.m2.max(0.0) / (total.n - 1) as f64).sqrt();
    Ok(MonteCarloOutcome {
        quantity: UncertainQuantity::new(total.mean, sigma, dimension)?,
        non_finite: total.non_finite,
        samples: mc.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64, s: f64) -> UncertainQuantity {
        UncertainQuantity::new(v, s, Dimension::Dimensionless).unwrap()
    }

    #[test]
    fn linear_identity() {
        let r = propagate_linear(|x| x[0], &[q(5.0, 0.1)], Dimension::Dimensionless).unwrap();
        assert_eq!(r.value(), 5.0);
        assert!((r.sigma() - 0.1).abs() < 1e-9);
    }

    #[test]
    fn linear_square() {
        let r = propagate_linear(|x| x[0] * x[0], &[q(2.0, 0.01)], Dimension::Dimensionless)
            .unwrap();
        assert_eq!(r.value(), 4.0);
        assert!((r.sigma() - 0.04).abs() < 1e-9);
    }

    #[test]
    fn linear_flags_non_finite() {
        let err = propagate_linear(|x| x[0].ln(), &[q(0.0, 0.1)], Dimension::Dimensionless);
        assert!(matches!(err, Err(Error::Evaluation(_))));
        // Finite at the centre, infinite on the stencil.
        let err = propagate_linear(
            |x| if x[0] == 1.0 { 1.0 } else { f64::INFINITY },
            &[q(1.0, 0.1)],
            Dimension::Dimensionless,
        );
        assert!(matches!(err, Err(Error::Evaluation(_))));
    }

    #[test]
    fn monte_carlo_zero_sigma() {
        let mc = MonteCarlo::new(5000, 3);
        let r = propagate_monte_carlo(
            |x| x[0] * x[1],
            &[q(3.0, 0.0), q(7.0, 0.0)],
            Dimension::Dimensionless,
            &mc,
        )
        .unwrap();
        assert_eq!(r.quantity.value(), 21.0);
        assert_eq!(r.quantity.sigma(), 0.0);
    }

    #[test]
    fn monte_carlo_independent_sum() {
        let mc = MonteCarlo::new(100_000, 11);
        let r = propagate_monte_carlo(
            |x| x[0] + x[1],
            &[q(1.0, 1.0), q(1.0, 1.0)],
            Dimension::Dimensionless,
            &mc,
        )
        .unwrap();
        assert!((r.quantity.sigma() / 2f64.sqrt() - 1.0).abs() < 0.05);
        assert!((r.quantity.value() - 2.0).abs() < 0.03);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let mc = MonteCarlo::new(10_000, 42);
        let f = |x: &[f64]| x[0].exp() / x[1];
        let ins = [q(0.3, 0.05), q(2.0, 0.1)];
        let a = propagate_monte_carlo(f, &ins, Dimension::Dimensionless, &mc).unwrap();
        let b = propagate_monte_carlo(f, &ins, Dimension::Dimensionless, &mc).unwrap();
        assert_eq!(a, b);
        let c = propagate_monte_carlo(
            f,
            &ins,
            Dimension::Dimensionless,
            &MonteCarlo::new(10_000, 43),
        )
        .unwrap();
        assert_ne!(a.quantity.value(), c.quantity.value());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn monte_carlo_backends_bit_identical() {
        let f = |x: &[f64]| x[0].sin() * x[1];
        let ins = [q(0.3, 0.05), q(2.0, 0.1)];
        let seq = MonteCarlo::new(30_001, 9).with_backend(Backend::Sequential);
        let par = MonteCarlo::new(30_001, 9).with_backend(Backend::Parallel);
        assert_eq!(
            propagate_monte_carlo(f, &ins, Dimension::Dimensionless, &seq).unwrap(),
            propagate_monte_carlo(f, &ins, Dimension::Dimensionless, &par).unwrap()
        );
    }

    #[test]
    fn monte_carlo_counts_non_finite() {
        let mc = MonteCarlo::new(10_000, 1);
        // ln of a normal centred at 3σ: ~0.13% negative draws, tolerated.
        let r = propagate_monte_carlo(|x| x[0].ln(), &[q(3.0, 1.0)], Dimension::Dimensionless, &mc)
            .unwrap();
        assert!(r.non_finite > 0);
        // Centred at 0: half the draws fail.
        let err =
            propagate_monte_carlo(|x| x[0].ln(), &[q(0.0, 1.0)], Dimension::Dimensionless, &mc);
        assert!(matches!(err, Err(Error::Evaluation(_))));
    }

    #[test]
    fn monte_carlo_requires_enough_samples() {
        let mc = MonteCarlo::new(999, 1);
        assert!(propagate_monte_carlo(|x| x[0], &[q(1.0, 1.0)], Dimension::Dimensionless, &mc)
            .is_err());
    }
}
