use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::replay::unit_hash;
use super::{compute_lift, replay, LiftResult, ReplayOptions, SimError};
use crate::featurization::{BuyerGroupMap, RawRecord};
use crate::money::Money;
use crate::policy::{train_policy, PolicyError, TrainOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub validation: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        SplitFractions {
            train: 0.5,
            validation: 0.2,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DataSplit {
    pub train: Vec<RawRecord>,
    pub validation: Vec<RawRecord>,
    /// Replayed to measure lift; never seen in training.
    pub holdout: Vec<RawRecord>,
}

/// Assigns each record by a seeded hash of its id, so membership does not
/// depend on record order.
pub fn split_records(
    records: &[RawRecord],
    seed: u64,
    fractions: SplitFractions,
) -> Result<DataSplit, SimError> {
    let SplitFractions { train, validation } = fractions;
    if !(train > 0.0 && validation > 0.0 && train + validation < 1.0) {
        return Err(SimError::Config(format!(
            "split fractions train={train} validation={validation} must be positive and leave a holdout"
        )));
    }
    let mut split = DataSplit::default();
    for r in records {
        let u = unit_hash(seed, r.record_id);
        let part = if u < train {
            &mut split.train
        } else if u < train + validation {
            &mut split.validation
        } else {
            &mut split.holdout
        };
        part.push(r.clone());
    }
    Ok(split)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub high_value_cutoffs: Vec<Money>,
    pub gap_cutoffs: Vec<Money>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            high_value_cutoffs: [5, 10, 15].into_iter().map(Money::whole).collect(),
            gap_cutoffs: [1, 2, 3].into_iter().map(Money::whole).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub high_value_cutoff: Money,
    pub gap_cutoff: Money,
    pub lift: Option<LiftResult>,
    pub effected_auctions: u64,
    /// Why the point was not evaluated, e.g. a label with a single class.
    pub skipped: Option<String>,
    pub cascade_halted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSearch {
    pub points: Vec<GridPoint>,
    /// Index into `points` of the highest lift.
    pub best: Option<usize>,
}

impl GridSearch {
    pub fn best_point(&self) -> Option<&GridPoint> {
        self.best.map(|i| &self.points[i])
    }
}

/// Trains on `split.train`/`split.validation` with the given cutoffs and
/// measures lift on `split.holdout`.
pub fn evaluate_grid_point(
    split: &DataSplit,
    buyer_groups: &BuyerGroupMap,
    base: &TrainOptions,
    replay_options: &ReplayOptions,
    high_value_cutoff: Money,
    gap_cutoff: Money,
) -> Result<GridPoint, SimError> {
    let mut options = base.clone();
    options.buckets = base.buckets.with_high_value_cutoff(high_value_cutoff);
    options.buckets.gap_cutoff = gap_cutoff;
    let mut point = GridPoint {
        high_value_cutoff,
        gap_cutoff,
        lift: None,
        effected_auctions: 0,
        skipped: None,
        cascade_halted: false,
    };
    if high_value_cutoff >= base.buckets.outlier_cap {
        // Training records are capped, so no auction can be high-value here.
        point.skipped = Some(format!(
            "high-value cutoff {high_value_cutoff} is at or above the outlier cap {}; no positives",
            base.buckets.outlier_cap
        ));
        return Ok(point);
    }
    let training = match train_policy(
        &split.train,
        &split.validation,
        buyer_groups.clone(),
        &options,
    ) {
        Ok(t) => t,
        Err(e @ PolicyError::SingleClass { .. }) => {
            point.skipped = Some(e.to_string());
            return Ok(point);
        }
        Err(e) => return Err(e.into()),
    };
    point.cascade_halted = training.cascade_halt.is_some();
    let opts = ReplayOptions {
        high_value_cutoff,
        keep_decisions: false,
        ..replay_options.clone()
    };
    let outcome = replay(&split.holdout, Some(&training.models), &opts)?;
    point.effected_auctions =
        outcome.policy.effected_high_value.auctions + outcome.policy.effected_low_value.auctions;
    point.lift = Some(compute_lift(&outcome.policy, &outcome.baseline)?);
    Ok(point)
}

/// Evaluates every cutoff pair and picks the highest lift. Equal lifts go to
/// the higher high-value cutoff, then the higher gap cutoff.
pub fn grid_search_cutoffs(
    split: &DataSplit,
    buyer_groups: &BuyerGroupMap,
    base: &TrainOptions,
    replay_options: &ReplayOptions,
    grid: &GridSpec,
) -> Result<GridSearch, SimError> {
    if grid.high_value_cutoffs.is_empty() || grid.gap_cutoffs.is_empty() {
        return Err(SimError::EmptyGrid);
    }
    let pairs: Vec<(Money, Money)> = grid
        .high_value_cutoffs
        .iter()
        .flat_map(|hv| grid.gap_cutoffs.iter().map(move |g| (*hv, *g)))
        .collect();
    let points = pairs
        .par_iter()
        .map(|(hv, g)| evaluate_grid_point(split, buyer_groups, base, replay_options, *hv, *g))
        .collect::<Result<Vec<_>, _>>()?;
    let best = points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            p.lift.map(|l| {
                (
                    i,
                    (l.absolute_lift.units(), p.high_value_cutoff, p.gap_cutoff),
                )
            })
        })
        .max_by(|a, b| a.1.cmp(&b.1))
        .map(|(i, _)| i);
    Ok(GridSearch { points, best })
}

pub fn write_grid_csv<W: Write>(writer: W, search: &GridSearch) -> Result<(), SimError> {
    let io = |e: csv::Error| SimError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "high_value_cutoff",
        "gap_cutoff",
        "status",
        "absolute_lift",
        "relative_lift",
        "effected_auctions",
        "best",
    ])
    .map_err(io)?;
    for (i, p) in search.points.iter().enumerate() {
        let status = match (&p.skipped, p.cascade_halted) {
            (Some(_), _) => "skipped",
            (None, true) => "halted",
            (None, false) => "ok",
        };
        w.write_record([
            p.high_value_cutoff.to_string(),
            p.gap_cutoff.to_string(),
            status.to_string(),
            p.lift
                .map(|l| l.absolute_lift.to_string())
                .unwrap_or_default(),
            p.lift
                .map(|l| l.relative_lift.to_string())
                .unwrap_or_default(),
            p.effected_auctions.to_string(),
            (search.best == Some(i)).to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| SimError::Io(e.to_string()))
}
