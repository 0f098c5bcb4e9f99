use thiserror::Error;

use crate::tropical::Configuration;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "enumeration cap exceeded: {candidates} candidate configurations > cap {cap}; use the sampler instead"
    )]
    CapExceeded { candidates: u128, cap: u128 },

    #[error("LP solver failure ({reason}){}", .configuration.as_ref().map(|c| format!(" on configuration {c}")).unwrap_or_default())]
    Solver {
        reason: String,
        configuration: Option<Configuration>,
    },

    #[error("unbounded sample size: zero angle estimate for vertices {vertices:?}")]
    UnboundedSamples { vertices: Vec<usize> },

    #[error("point is not listed in the polytope")]
    UnknownPoint,
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
