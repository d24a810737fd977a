//! Auction log records, categorical encoding, and label construction.

mod groups;
mod labels;
mod record;
mod schema;

use thiserror::Error;

pub use groups::{bucketize_age, group_buyer_seat, AgeBucket, BuyerGroup, BuyerGroupMap};
pub use labels::{label_bids, label_records, BucketSchema, LabelSet};
pub use record::{filter_outliers, read_jsonl, write_jsonl, FilterReport, RawRecord};
pub use schema::{
    FeatureBlock, FeatureSchema, FeatureVector, FieldEncoding, FitOptions, SchemaId,
    FITTED_CATEGORICAL_FIELDS, NUMERIC_FIELDS, UNKNOWN_CATEGORY,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("schema references unknown field `{0}`")]
    UnknownField(String),
    #[error("feature vector has dimension {found}, schema expects {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("schema id mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: SchemaId, found: SchemaId },
    #[error("record {record_id}: {reason}")]
    InvalidRecord { record_id: u64, reason: String },
    #[error("invalid bucket schema: {0}")]
    InvalidBuckets(String),
    #[error("bucket id {0} out of range")]
    InvalidBucket(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o: {0}")]
    Io(String),
}
