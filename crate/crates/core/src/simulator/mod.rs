//! Synthetic log generation, counterfactual replay, revenue lift and the
//! cutoff grid search.

mod grid;
mod lift;
mod replay;
mod synth;

use thiserror::Error;

pub use grid::{
    evaluate_grid_point, grid_search_cutoffs, split_records, write_grid_csv, DataSplit, GridPoint,
    GridSearch, GridSpec, SplitFractions,
};
pub use lift::{compute_lift, LiftResult, SegmentDeltas};
pub use replay::{
    replay, sample_keep, write_revenue_csv, ReplayOptions, ReplayOutcome, RevenueReport, Segment,
    SegmentLedger,
};
pub use synth::{generate_synthetic_logs, SyntheticConfig, SyntheticLogs};

use crate::featurization::FeatureError;
use crate::policy::PolicyError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("baseline revenue is zero; relative lift undefined")]
    ZeroBaseline,
    #[error("grid is empty")]
    EmptyGrid,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
}
