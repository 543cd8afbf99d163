use crate::quantities::{Dimension, UncertainQuantity};
use crate::{Error, Result};

const MIN_WINDOW_POINTS: usize = 4;

/// Absorption coefficient against photon energy.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionSpectrum {
    points: Vec<(f64, f64)>,
}

impl AbsorptionSpectrum {
    /// `points` are `(photon energy eV, α 1/m)`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("empty spectrum"));
        }
        for (i, &(e, a)) in points.iter().enumerate() {
            if !e.is_finite() || !(a >= 0.0) || !a.is_finite() {
                return Err(Error::param(format!("bad spectrum point {i}: ({e}, {a})")));
            }
            if i > 0 && e <= points[i - 1].0 {
                return Err(Error::param(format!(
                    "energies must increase strictly (point {i})"
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn from_fn(energies: impl IntoIterator<Item = f64>, alpha: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(energies.into_iter().map(|e| (e, alpha(e))).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// Direct-gap Tauc extrapolation: a straight line through `(αE)²` against
/// `E` over `window` (eV, inclusive), returning its zero crossing.
pub fn tauc_bandgap(spectrum: &AbsorptionSpectrum, window: (f64, f64)) -> Result<UncertainQuantity> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::param(format!("empty edge window [{lo}, {hi}]")));
    }
    let pts: Vec<(f64, f64)> = spectrum
        .points
        .iter()
        .filter(|(e, _)| *e >= lo && *e <= hi)
        .map(|&(e, a)| (e, (a * e).powi(2)))
        .collect();
    let n = pts.len();
    if n < MIN_WINDOW_POINTS {
        return Err(Error::EdgeDetection(format!(
            "{n} points in window, need at least {MIN_WINDOW_POINTS}"
        )));
    }
    let nf = n as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let slope = sxy / sxx;
    if !(slope > 0.0) {
        return Err(Error::EdgeDetection(format!(
            "fitted slope {slope:e} is not positive"
        )));
    }
    // y = ym + slope (x − xm) crosses zero at xm − ym/slope.
    let gap = xm - ym / slope;
    let sigma = if n > 2 {
        let ss: f64 = pts
            .iter()
            .map(|p| (p.1 - ym - slope * (p.0 - xm)).powi(2))
            .sum();
        let s2 = ss / (nf - 2.0);
        let var_ym = s2 / nf;
        let var_slope = s2 / sxx;
        // ym and slope are uncorrelated about the centroid.
        let d_ym = 1.0 / slope;
        let d_slope = ym / (slope * slope);
        (d_ym * d_ym * var_ym + d_slope * d_slope * var_slope).sqrt()
    } else {
        0.0
    };
    UncertainQuantity::new(gap, sigma, Dimension::ElectronVolt)
}
