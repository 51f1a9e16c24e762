use thiserror::Error;

/// Errors produced by the operator algebra and the certification engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid norm exponent p = {0} (allowed: 1 <= p <= 64, or p = inf)")]
    InvalidExponent(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported composition: {0}")]
    UnsupportedComposition(String),

    #[error("no graph samples within radius {radius}")]
    NoSamples { radius: f64 },

    #[error("function has empty effective domain")]
    EmptyDomain,

    #[error("function is not convex: {0}")]
    NotConvex(String),

    #[error("operation requires a Hilbert (p = 2) space, got p = {0}")]
    NotHilbert(f64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("no corpus entries match `{0}`")]
    EmptySelection(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
