use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by validation, parsing and numerical routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on arguments or configuration was violated.
    #[error("validation: {0}")]
    Validation(String),

    /// Malformed input data; `row`/`column` are 1-based positions in the
    /// offending file (0 = header / not applicable).
    #[error("parse error in {path} at row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },

    /// A numerical routine failed to produce a usable result.
    #[error("numerical: {0}")]
    Numerical(String),

    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
