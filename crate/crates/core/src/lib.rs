//! Numerical toolkit for high-finesse cavities coated with transparent
//! conductive oxides.
//!
//! The analysis chain runs ring-down trace → linewidth → finesse → mirror
//! reflectivity → film extinction coefficient, next to models for the impact
//! of stray surface charge on trapped ions and Rydberg atoms and a lumped
//! model of laser-induced film charging. Every reported number carries a
//! one-sigma uncertainty propagated either linearly or by Monte Carlo.
//!
//! Data-parallel inner loops (Monte-Carlo sampling, ensemble fits, parameter
//! sweeps) run on rayon when the `parallel` feature is enabled and fall back
//! to a sequential loop otherwise; both backends produce bit-identical
//! results for a fixed seed.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity_optics;
pub mod charging;
pub mod electrostatics;
mod error;
pub mod exec;
pub mod film_optics;
pub mod ion_impact;
pub mod quantities;
pub mod report;
pub mod ringdown;
pub mod rydberg_impact;
pub mod scenario;

pub use error::{Error, Result};
pub use exec::Backend;
pub use quantities::{Dimension, MonteCarlo, UncertainQuantity};
