//! Decision stumps, AdaBoost, thresholded strong classifiers, and ROC/AUC.

mod adaboost;
mod dataset;
mod roc;
mod strong;
mod stump;

use thiserror::Error;

pub use adaboost::{
    adaboost_train, clamp_epsilon, compute_alpha, BoostRound, Booster, EPSILON_CEIL, EPSILON_FLOOR,
};
pub use dataset::TrainingSet;
pub use roc::{roc_auc, roc_curve};
pub use strong::{StrongClassifier, WeightedStump};
pub use stump::{train_stump, weighted_error, Polarity, Stump, StumpFit};

use crate::featurization::SchemaId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoostError {
    #[error("epsilon {0} outside (0, 1)")]
    EpsilonDomain(f64),
    #[error("need both classes, got {positives} positives out of {n}")]
    SingleClass { n: usize, positives: usize },
    #[error("no training examples")]
    Empty,
    #[error("boosting needs at least one round")]
    NoRounds,
    #[error("feature subset is empty")]
    EmptyFeatureSubset,
    #[error("{rows} rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("classifier trained on schema {expected}, input encoded with {found}")]
    Schema { expected: SchemaId, found: SchemaId },
    #[error("NaN in input")]
    NotANumber,
    #[error("serialization: {0}")]
    Serde(String),
}
