use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("array length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("field contains a non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("fields have zero norm")]
    ZeroNorm,

    #[error("perturbative denominator vanishes inside the support at x = {locations:?}")]
    SingularDenominator { locations: Vec<f64> },

    #[error("imaginary-time step became unstable at tau = {tau}: {detail}")]
    Unstable { tau: f64, detail: String },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
