use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("basis cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: u32, right: u32 },

    #[error("eigensolver did not converge (LAPACK info = {info})")]
    SolverFailure { info: i32 },

    #[error("state has mixed parity support (even weight {even_weight:.12})")]
    MixedParity { even_weight: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("eigenvector coefficients are not available for this solution")]
    MissingCoefficients,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("search radius exhausted before the requested level count was reached")]
    SearchExhausted,

    #[error("training diverged (non-finite loss in epoch {epoch})")]
    Divergence { epoch: usize },

    #[error("file format error: {0}")]
    Format(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
