use thiserror::Error;

/// Errors raised by mesh generation, assembly and the spectral solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported basis: {0}")]
    Basis(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("assembly failed: {0}")]
    Assembly(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("eigensolver did not converge after {iterations} iterations ({found} of {requested} pairs)")]
    NotConverged {
        iterations: usize,
        found: usize,
        requested: usize,
        partial: Vec<f64>,
    },

    #[error("eigensolver failed: {0}")]
    Solver(String),

    #[error("field is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
