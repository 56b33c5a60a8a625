use std::io;

use thiserror::Error;

/// Errors produced by tensor construction, algebra and fitting routines.
#[derive(Debug, Error)]
pub enum TensorError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("degenerate factor: {0}")]
    DegenerateFactor(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("unrecognized file format: {0}")]
    Format(String),

    #[error("corrupt file: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, TensorError>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::TensorError::InvalidArgument(format!($($arg)*))
    };
}

macro_rules! mismatch {
    ($($arg:tt)*) => {
        $crate::error::TensorError::ShapeMismatch(format!($($arg)*))
    };
}

pub(crate) use invalid;
pub(crate) use mismatch;
