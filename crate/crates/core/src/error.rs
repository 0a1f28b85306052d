use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: ranges, lengths, domains, malformed files.
    Validation,
    /// A numerical procedure did not reach its tolerance.
    Tolerance,
    /// A property that holds by construction was observed to fail.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of window: {0}")]
    Range(String),

    #[error("window too short: need at least {needed} entries, got {got}")]
    WindowTooShort { needed: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error(
        "{what}: tolerance {requested:e} not reached (estimate {estimate}, error {achieved:e})"
    )]
    Tolerance {
        what: String,
        requested: f64,
        achieved: f64,
        estimate: f64,
    },

    #[error("window of {got} entries needs extension to {needed} and strict window mode is on")]
    StrictWindow { needed: usize, got: usize },

    #[error("internal invariant failed: {0}")]
    Invariant(String),

    #[error("{path}: {field}: {message}")]
    Format {
        path: PathBuf,
        field: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Tolerance { .. } => ErrorClass::Tolerance,
            Error::Invariant(_) => ErrorClass::Internal,
            _ => ErrorClass::Validation,
        }
    }
}
