use thiserror::Error;

use crate::model::Region;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid {region:?} kernel: {reason}")]
    InvalidKernel { region: Region, reason: String },

    #[error("support violation: atom ({dx}, {dy}) is not allowed in a {region:?} kernel")]
    SupportViolation { region: Region, dx: i64, dy: i64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("null interior drift: the stationary distribution cannot have a light tail")]
    UnsupportedNullDrift,

    #[error("model is not stable")]
    Unstable,

    #[error("rates do not sum to one (lambda + mu1 + mu2 = {0}); pass normalize to rescale")]
    Normalization(f64),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("batch distribution has simultaneous arrivals at both nodes")]
    SimultaneousArrivals,

    #[error("no convergence after {iterations} iterations: {detail}")]
    NonConvergence { iterations: usize, detail: String },

    #[error("fit window too noisy (r^2 = {r_squared:.6})")]
    WindowTooNoisy { r_squared: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
