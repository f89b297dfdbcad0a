use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A required CSV column is absent from the header row.
    #[error("missing required column `{0}`")]
    MissingColumn(String),

    /// A CSV cell could not be interpreted. `row` is the 1-based line in the
    /// input, counting the header as line 1.
    #[error("row {row}: {message}")]
    Parse { row: u64, message: String },

    #[error("row {row}: duplicate algorithm name `{name}`")]
    DuplicateAlgorithm { row: u64, name: String },

    /// A parsed algorithm violates a parameter invariant.
    #[error("invalid algorithm `{name}`: {reason}")]
    InvalidAlgorithm { name: String, reason: String },

    #[error("Requested algorithm type not found. (`{name}`)")]
    AlgorithmNotFound { name: String },

    #[error("unknown role type `{0}` (expected Root, Timestamp, Snapshot or Target)")]
    UnknownRoleType(String),

    #[error("start date {start} is after end date {end}")]
    Range {
        start: chrono::NaiveDate,
        end: chrono::NaiveDate,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
