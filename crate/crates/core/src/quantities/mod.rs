//! Dimensioned values with symmetric one-sigma uncertainty, physical
//! constants, and the two uncertainty-propagation engines used by every
//! other module.

pub mod constants;
mod propagate;

use std::fmt;

use crate::{Error, Result};

pub use propagate::{propagate_linear, propagate_monte_carlo, MonteCarlo, MonteCarloOutcome};

/// Physical dimension tag carried by an [`UncertainQuantity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Frequency,
    AngularFrequency,
    Length,
    Time,
    /// Charge counted in elementary charges.
    ElementaryCharge,
    Coulomb,
    Field,
    Energy,
    /// Photon energy in electron-volts.
    ElectronVolt,
    Resistance,
    Resistivity,
    Capacitance,
    Voltage,
    Power,
    Dimensionless,
}

impl Dimension {
    pub fn unit(self) -> &'static str {
        match self {
            Dimension::Frequency => "Hz",
            Dimension::AngularFrequency => "rad/s",
            Dimension::Length => "m",
            Dimension::Time => "s",
            Dimension::ElementaryCharge => "e",
            Dimension::Coulomb => "C",
            Dimension::Field => "V/m",
            Dimension::Energy => "J",
            Dimension::ElectronVolt => "eV",
            Dimension::Resistance => "Ω",
            Dimension::Resistivity => "Ω·m",
            Dimension::Capacitance => "F",
            Dimension::Voltage => "V",
            Dimension::Power => "W",
            Dimension::Dimensionless => "1",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.unit())
    }
}

/// A value with a symmetric Gaussian one-standard-deviation uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertainQuantity {
    value: f64,
    sigma: f64,
    dimension: Dimension,
}

impl UncertainQuantity {
    pub fn new(value: f64, sigma: f64, dimension: Dimension) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::param(format!("value must be finite, got {value}")));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::param(format!(
                "sigma must be finite and non-negative, got {sigma}"
            )));
        }
        Ok(Self {
            value,
            sigma,
            dimension,
        })
    }

    /// A quantity without uncertainty.
    pub fn exact(value: f64, dimension: Dimension) -> Self {
        Self {
            value,
            sigma: 0.0,
            dimension,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    /// `sigma / |value|`; infinite for a zero value with non-zero sigma.
    pub fn relative_sigma(&self) -> f64 {
        if self.sigma == 0.0 {
            0.0
        } else {
            self.sigma / self.value.abs()
        }
    }

    /// Sum of two independent quantities of the same dimension.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            value: self.value + other.value,
            sigma: self.sigma.hypot(other.sigma),
            dimension: self.dimension,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            value: self.value - other.value,
            sigma: self.sigma.hypot(other.sigma),
            dimension: self.dimension,
        })
    }

    /// Multiplies by an exact dimensionless factor.
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            sigma: self.sigma * factor.abs(),
            dimension: self.dimension,
        }
    }

    /// Dimensionless ratio of two independent quantities of equal dimension.
    pub fn ratio(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        propagate_linear(
            |x| x[0] / x[1],
            &[*self, *other],
            Dimension::Dimensionless,
        )
    }

    /// Same numbers, different dimension tag. Used at unit-conversion
    /// boundaries, never for arithmetic.
    pub fn retag(&self, dimension: Dimension) -> Self {
        Self { dimension, ..*self }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dimension == other.dimension {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(self.dimension, other.dimension))
        }
    }
}

impl fmt::Display for UncertainQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6e} ± {:.2e} {}", self.value, self.sigma, self.dimension)
    }
}
