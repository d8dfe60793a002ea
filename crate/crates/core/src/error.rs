use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("coordinate {value} at point {point}, axis {axis} lies outside [0, 1]")]
    OutOfRange {
        point: usize,
        axis: usize,
        value: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("corner grid has {cells} cells, over the budget of {budget}")]
    GridTooLarge { cells: u128, budget: u128 },

    #[error("invalid direction entry for dimension {dim}: {message}")]
    InvalidDirection { dim: usize, message: String },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}
