use thiserror::Error;

/// Errors raised by the estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TailError {
    #[error("parse failure at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("nonpositive value at line {line}")]
    NonPositive { line: usize },

    #[error("need at least 2 observations, got {0}")]
    TooFewObservations(usize),

    #[error("k = {k} out of range [{min}, {max}]")]
    KOutOfRange { k: usize, min: usize, max: usize },

    #[error("x = {x} is below the threshold {threshold}")]
    BelowThreshold { x: f64, threshold: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not estimable: {0}")]
    NonEstimable(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    #[error("study aborted: {0}")]
    StudyAborted(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl TailError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        TailError::InvalidArgument(msg.into())
    }
}

impl From<std::io::Error> for TailError {
    fn from(e: std::io::Error) -> Self {
        TailError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, TailError>;
