use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("index {index} out of range for series of length {len}")]
    InvalidIndex { index: usize, len: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no admissible warping path for lengths {m}x{n} with band radius {radius}")]
    BandInfeasible { m: usize, n: usize, radius: usize },

    #[error("brute-force DTW is capped at length {cap}, got {m}x{n}")]
    OracleTooLarge { m: usize, n: usize, cap: usize },

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("{}:{row}:{column}: {message}", path.display())]
    ParseError {
        path: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("{}:{row}:{column}: missing value inside a series", path.display())]
    MissingValueUnsupported {
        path: PathBuf,
        row: usize,
        column: usize,
    },

    #[error("{}:{row}: row has no values", path.display())]
    EmptySeries { path: PathBuf, row: usize },

    #[error("dataset mismatch: {0}")]
    DatasetMismatch(String),

    #[error("test label {0:?} does not occur in the training split")]
    UnknownLabel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
