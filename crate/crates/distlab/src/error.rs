//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate at point index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("duplicate points at indices {first} and {second} (zero pairwise distance)")]
    DuplicatePoints { first: usize, second: usize },

    #[error("matrix is not orthogonal (residual {residual:.3e} exceeds {limit:.3e})")]
    NotOrthogonal { residual: f64, limit: f64 },

    #[error("rigid motion has a reflection part; only orientation-preserving motions are supported here")]
    ReflectionPresent,

    #[error("coordinates lie at infinity (pure translation has no fixed point)")]
    CoordsAtInfinity,

    #[error("enumerating {required} tuples exceeds the cap of {cap}; enable sampling or shrink the instance")]
    EnumerationCap { required: u128, cap: u64 },

    #[error("grid of {cells} cells exceeds the cap of {cap}; increase the cell size or use sparse rasterization")]
    GridCap { cells: u128, cap: u64 },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("unknown recipe `{0}`")]
    UnknownRecipe(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("csv parse error: {0}")]
    CsvParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for usage/config problems, 3 for
    /// resource caps, 1 otherwise (verdict failures are not errors and are
    /// mapped separately).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EnumerationCap { .. } | Error::GridCap { .. } => 3,
            Error::InvalidParameter(_)
            | Error::Config(_)
            | Error::UnknownRecipe(_)
            | Error::CsvParse(_)
            | Error::EmptyInput(_) => 2,
            _ => 1,
        }
    }
}
