use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid world: {0}")]
    InvalidWorld(String),

    #[error("invalid sensor: {0}")]
    InvalidSensor(String),

    #[error("cannot place objects without overlap after {attempts} attempts")]
    Placement { attempts: usize },

    #[error("coordinate ({row}, {col}) is outside the {rows}x{cols} grid")]
    OutOfRange {
        row: i32,
        col: i32,
        rows: usize,
        cols: usize,
    },

    #[error("nothing to learn: the first scene has no salient sensory state")]
    NothingToLearn,

    #[error("expected {expected} verdicts, got {actual}")]
    VerdictCount { expected: usize, actual: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("k = {k} exceeds the {available} available points")]
    TooManyClusters { k: usize, available: usize },

    #[error("k must be at least 1")]
    ZeroClusters,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("replay mismatch at record {record}: {message}")]
    ReplayMismatch { record: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
