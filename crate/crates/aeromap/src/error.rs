use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or argument failed validation before any work started.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A position fell outside the map this operation requires.
    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    /// Not enough data to run an estimator.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Two grids that must be identical differ.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A numeric routine failed to produce a usable result.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Malformed artifact file (CSV/JSON payload).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code convention: 1 for config/validation problems,
    /// 2 for runtime or numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Parse(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
