use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid piecewise function: {0}")]
    InvalidPiecewise(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("interval mismatch: [{a1}, {b1}] vs [{a2}, {b2}]")]
    IntervalMismatch { a1: f64, b1: f64, a2: f64, b2: f64 },

    #[error("problem is not in normal form (p must be identically 1)")]
    NotNormalForm,

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("eigenvalue index must be at least 1, got {0}")]
    BadIndex(usize),

    #[error("failed to bracket eigenvalue {n}: {detail}")]
    Bracket { n: usize, detail: String },

    #[error(
        "oscillation count mismatch for eigenvalue {n} (lambda = {lambda}): expected {expected} interior zeros, found {found}"
    )]
    OscillationMismatch {
        n: usize,
        lambda: f64,
        expected: usize,
        found: usize,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("problem file: {0}")]
    Format(#[from] serde_json::Error),
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}
