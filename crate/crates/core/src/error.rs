use thiserror::Error;

use crate::conic::SolveStatus;

/// Errors reported by every module of the crate.
#[derive(Debug, Error)]
pub enum VqrdError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("program `{program}` did not solve: {status:?}")]
    Solver { program: String, status: SolveStatus },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("map is not invertible: {0}")]
    NotInvertible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, VqrdError>;

impl VqrdError {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        VqrdError::DimensionMismatch(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        VqrdError::OutOfRange(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        VqrdError::InvalidInput(msg.into())
    }
}
