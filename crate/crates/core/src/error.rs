use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("failed to parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("value {value} is outside [0, {limit}]")]
    OutOfRange { value: f64, limit: f64 },

    #[error("radius set S is empty; no admissible cluster radius")]
    EmptyRadiusSet,

    #[error("strict-mode guarantee violated: mu(S) = {mu} < R/2 = {required}")]
    GuaranteeViolation { mu: f64, required: f64 },

    #[error("brute force refused for n = {n} > {max_n} ({bell} set partitions)")]
    TooLarge { n: usize, max_n: usize, bell: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
