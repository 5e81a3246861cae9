use thiserror::Error;

/// Errors produced by the sparse PCA toolkit.
#[derive(Debug, Error)]
pub enum SpcaError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("infeasible point: {0}")]
    Infeasible(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("refusing to enumerate {count} candidates (cap {cap})")]
    Refused { count: u128, cap: u128 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SpcaError>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(SpcaError::Input(msg.into()))
}
