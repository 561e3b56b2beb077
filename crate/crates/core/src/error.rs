use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The saddle solver ran out of iterations before certifying its gap.
    /// Carries the best iterate so callers can fall back to it.
    #[error("solver failed to certify gap {gap:.3e} <= {tol:.3e} after {iterations} iterations")]
    SolverFailure {
        gap: f64,
        tol: f64,
        iterations: usize,
        phi: Vec<f64>,
        weights: Vec<f64>,
    },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Dimension { .. }
            | Error::InvalidPmf(_)
            | Error::Json(_)
            | Error::NotApplicable(_) => 2,
            Error::SolverFailure { .. } => 3,
            _ => 4,
        }
    }
}
