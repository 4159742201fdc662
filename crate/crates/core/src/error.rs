use thiserror::Error;

use crate::capacity::CeResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Kraus operators are not complete (max deviation {deviation:.3e})")]
    NotComplete { deviation: f64 },

    #[error("optimizer did not converge in {} iterations (gap {:.3e})", .best.iterations, .best.gap_bound)]
    NonConvergence { best: Box<CeResult> },

    #[error("optimization cancelled after {} iterations", .best.iterations)]
    Cancelled { best: Box<CeResult> },

    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    #[error("size limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
