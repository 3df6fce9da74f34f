use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, FraneError>;

#[derive(Debug, Error)]
pub enum FraneError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("non-numeric or non-finite cell at row {row}, column '{column}': {value:?}")]
    BadCell {
        /// 1-based data row (header excluded).
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row} has {found} fields, header has {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),

    #[error("ignored column '{0}' is not in the header")]
    UnknownColumn(String),

    #[error("need at least 3 features, found {0}")]
    TooFewFeatures(usize),

    #[error("need at least 1 example row")]
    NoRows,

    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("cannot split {rows} rows into {folds} folds")]
    InvalidFolds { rows: usize, folds: usize },

    #[error("fold index {fold} out of range (fold count {count})")]
    FoldOutOfRange { fold: usize, count: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("threshold {requested} is above a previously applied threshold {previous}")]
    ThresholdIncreased { requested: f64, previous: f64 },

    #[error("no qualifying graph: no threshold reaches average degree {min_avg_degree} on {n} features")]
    NoQualifyingGraph { min_avg_degree: f64, n: usize },

    #[error("candidate list is empty")]
    NoCandidates,

    #[error("every feature has zero variance on the training split")]
    AllZeroVariance,

    #[error("malformed similarity cache: {0}")]
    BadCache(String),

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl FraneError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FraneError::Io {
            path: path.into(),
            source,
        }
    }
}
