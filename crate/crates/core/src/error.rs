use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Hilbert-space dimension {0} (need d >= 2)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("not a valid state: smallest eigenvalue {min_eigenvalue:e}")]
    NotAState { min_eigenvalue: f64 },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0} (expected 1)")]
    BadTrace(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("decay rate has a pole at t = {t}")]
    Pole { t: f64 },

    #[error("time {t} outside the family domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("Kraus set at t = {t} is not trace preserving (deviation {deviation:e})")]
    NotTracePreserving { t: f64, deviation: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Errors caused by the user's input rather than by a numerical breakdown.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Numerical(_) | Error::NotAState { .. } | Error::Pole { .. })
    }
}
