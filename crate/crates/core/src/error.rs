use std::path::PathBuf;

use thiserror::Error;

use crate::trees::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed tree structure: {0}")]
    Structure(String),

    #[error("tree violates merge tree invariants: {0}")]
    InvalidTree(ValidationReport),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("size limit exceeded: {what} is {actual}, cap is {cap}")]
    SizeLimit {
        what: &'static str,
        actual: usize,
        cap: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file whose contents parsed but were rejected.
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("image encoding failed: {0}")]
    Image(#[from] image::ImageError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
