//! Tabular dataset pipeline: schema definition, CSV round-trip, summary
//! statistics, scaling, client partitioning, and holdout selection.

mod csv_io;
mod dataset;
mod partition;
mod preprocess;
mod schema;
mod stats;
mod surrogate;

pub use csv_io::{load_csv, save_csv};
pub use dataset::TabularDataset;
pub use partition::{holdout_select, holdout_split, partition, PartitionPlan, SplitStrategy};
pub use preprocess::{preprocess, ScaledDataset, Scaler};
pub use schema::{Column, ColumnKind, FeatureSchema};
pub use stats::{fidelity_report, histogram, summarize, ColumnSummary, Histogram};
pub use surrogate::synthesize_heart_corpus;

use thiserror::Error;

/// Errors raised by the dataset pipeline.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("header mismatch in {path}: expected column {index} to be '{expected}', found '{found}'")]
    Header {
        path: String,
        index: usize,
        expected: String,
        found: String,
    },

    #[error("record {record} in {path} has {found} fields, expected {expected}")]
    FieldCount {
        path: String,
        record: usize,
        expected: usize,
        found: usize,
    },

    #[error("record {record}, column '{column}': cannot parse '{value}' as a number")]
    Parse {
        record: usize,
        column: String,
        value: String,
    },

    #[error("record {record}, column '{column}': value {value} outside legal range [{min}, {max}]")]
    Range {
        record: usize,
        column: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("record {record}, column '{column}': value {value} is not an integer code")]
    NotInteger {
        record: usize,
        column: String,
        value: f64,
    },

    #[error("record {record}, column '{column}': label must be 0 or 1, found {value}")]
    Label {
        record: usize,
        column: String,
        value: f64,
    },

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("invalid partition plan: {0}")]
    Plan(String),

    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, DataError>;
