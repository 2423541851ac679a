use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite (smallest eigenvalue {margin:e})")]
    NotPositiveDefinite { margin: f64 },

    #[error("point is not interior to {domain} (margin {margin:e})")]
    NotInterior { domain: String, margin: f64 },

    #[error("numerical singularity: {0}")]
    Singularity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("estimation failed: {0}")]
    Estimation(String),
}

impl LabError {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        LabError::Validation(msg.into())
    }

    pub(crate) fn singular(msg: impl Into<String>) -> Self {
        LabError::Singularity(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        LabError::Unsupported(msg.into())
    }

    pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(LabError::DimensionMismatch { expected, got })
        }
    }

    /// True for errors raised by evaluating at (or numerically near) a pole or branch point.
    pub fn is_singularity(&self) -> bool {
        matches!(self, LabError::Singularity(_))
    }
}
