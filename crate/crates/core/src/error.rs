use thiserror::Error;

use crate::model::ValidationReport;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(ValidationReport),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing required keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("duplicate key `{key}` on lines {first} and {second}")]
    DuplicateKey {
        key: String,
        first: usize,
        second: usize,
    },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },

    #[error("spectrum formula derived at zero detuning; operating point has Delta = {delta:e} rad/s")]
    NonResonant { delta: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_config_error(&self) -> bool {
        !matches!(self, Error::Numerical(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
