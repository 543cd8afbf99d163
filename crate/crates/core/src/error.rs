use thiserror::Error;

use crate::quantities::Dimension;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(Dimension, Dimension),
    #[error("invalid trace: {0}")]
    Trace(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error(
        "fit did not converge after {iterations} iterations \
         (last iterate v0 = {v0}, linewidth = {linewidth_hz} Hz)"
    )]
    FitNotConverged {
        iterations: usize,
        v0: f64,
        linewidth_hz: f64,
    },
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("trap destabilized: k_t + s_q·B = {0:e} J/m² is not positive")]
    Stability(f64),
    #[error("search error: {0}")]
    Search(String),
    #[error("edge detection error: {0}")]
    EdgeDetection(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
