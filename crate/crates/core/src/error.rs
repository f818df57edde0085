use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model schema error: {0}")]
    Schema(String),

    #[error("kinematic graph contains a cycle through joint `{0}`")]
    CyclicGraph(String),

    #[error("joint `{0}` has a non-unit axis (norm {1})")]
    NonUnitAxis(String, f64),

    #[error("joint `{0}` has inverted limits [{1}, {2}]")]
    InvertedLimits(String, f64, f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unknown link `{0}`")]
    UnknownLink(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver diverged: {0}")]
    Divergence(String),

    #[error("motion file {path}: {message}")]
    MotionFormat { path: PathBuf, message: String },

    #[error("duplicate motion id `{0}`")]
    DuplicateId(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn dims(expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch { expected, actual }
    }
}
