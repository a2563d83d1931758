use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("labels must contain both classes")]
    SingleClass,

    #[error("unknown detector `{0}`")]
    UnknownDetector(String),

    #[error("parameter `{name}` out of search space for {detector}: {value}")]
    ParamOutOfSpace {
        detector: String,
        name: String,
        value: String,
    },

    #[error("search budget exhausted before any evaluation completed")]
    BudgetExhausted,

    #[error("duplicate store id `{0}`")]
    DuplicateId(String),

    #[error("unknown store id `{0}`")]
    UnknownId(String),

    #[error("invalid store id `{0}`: use [A-Za-z0-9_.-] only")]
    InvalidId(String),

    #[error("corrupt store index {path}: {reason}")]
    CorruptIndex { path: PathBuf, reason: String },

    #[error("empty effective store")]
    EmptyStore,

    #[error("distance computation failed for every store entry")]
    AllDistancesFailed,

    #[error("missing labels for dataset `{0}`")]
    MissingLabels(String),

    #[error("missing cells in score table: {0}")]
    MissingCells(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error at {path}: {source}")]
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

    pub(crate) fn dims(expected: impl ToString, got: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
