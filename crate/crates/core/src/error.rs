//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: expected length {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("degenerate weights: {0}")]
    DegenerateWeights(&'static str),

    #[error("non-binary entry {value} at row {row}, column {col}: use the binomial path")]
    NonBinaryData { row: usize, col: usize, value: f64 },

    #[error("count {count} exceeds trials {trials} at column {col}")]
    CountExceedsTrials { col: usize, count: f64, trials: f64 },

    #[error("matrix entry at row {row}, column {col} is {value}; entries must be {requirement}")]
    BadEntry {
        row: usize,
        col: usize,
        value: f64,
        requirement: &'static str,
    },

    #[error("covariance is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("verse {id} annotated more than once or missing: {msg}")]
    Annotation { id: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }
}
