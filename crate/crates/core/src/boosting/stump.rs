use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::TrainingSet;

/// Which side of the threshold votes +1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }
}

impl From<Polarity> for i8 {
    fn from(p: Polarity) -> i8 {
        match p {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
        }
    }
}

impl TryFrom<i8> for Polarity {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Polarity::Positive),
            -1 => Ok(Polarity::Negative),
            other => Err(format!("polarity must be 1 or -1, got {other}")),
        }
    }
}

/// Single-feature decision stump: votes `polarity` when
/// `x[feature_index] >= threshold`, the opposite otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stump {
    pub feature_index: usize,
    pub threshold: f64,
    pub polarity: Polarity,
}

impl Stump {
    /// Threshold used by stumps that vote the same way for every input.
    pub const CONSTANT_THRESHOLD: f64 = f64::MIN;

    pub fn constant(feature_index: usize, polarity: Polarity) -> Self {
        Stump {
            feature_index,
            threshold: Self::CONSTANT_THRESHOLD,
            polarity,
        }
    }

    #[inline]
    pub fn predict(&self, x: &[f64]) -> bool {
        self.vote_value(x[self.feature_index]) > 0.0
    }

    #[inline]
    pub fn vote(&self, x: &[f64]) -> f64 {
        self.vote_value(x[self.feature_index])
    }

    #[inline]
    pub(crate) fn vote_value(&self, value: f64) -> f64 {
        if value >= self.threshold {
            self.polarity.sign()
        } else {
            -self.polarity.sign()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StumpFit {
    pub stump: Stump,
    /// Weighted error from the search scan.
    pub error: f64,
}

/// Weighted error of `stump` by direct evaluation over every example.
pub fn weighted_error(set: &TrainingSet, weights: &[f64], stump: &Stump) -> f64 {
    let column = set.column(stump.feature_index);
    column
        .iter()
        .zip(set.labels())
        .zip(weights)
        .filter(|((v, y), _)| (stump.vote_value(**v) > 0.0) != **y)
        .map(|(_, w)| *w)
        .sum()
}

/// Exhaustive stump search minimizing weighted error.
///
/// Candidates per feature are the midpoints between consecutive distinct
/// values, each with both polarities, plus a constant stump. Ties go to the
/// lowest feature index, then the lowest threshold, then positive polarity.
pub fn train_stump(
    set: &TrainingSet,
    weights: &[f64],
    feature_subset: Option<&[usize]>,
) -> StumpFit {
    assert_eq!(weights.len(), set.len(), "one weight per example");
    let all: Vec<usize>;
    let features: &[usize] = match feature_subset {
        Some(f) => f,
        None => {
            all = (0..set.dimension()).collect();
            &all
        }
    };
    assert!(
        !features.is_empty(),
        "stump search needs at least one feature"
    );

    let labels = set.labels();
    let (mut total_pos, mut total_neg) = (0.0, 0.0);
    for (y, w) in labels.iter().zip(weights) {
        if *y {
            total_pos += w;
        } else {
            total_neg += w;
        }
    }

    let first = features.iter().copied().min().expect("non-empty");
    let constant = if total_pos >= total_neg {
        StumpFit {
            stump: Stump::constant(first, Polarity::Positive),
            error: total_neg,
        }
    } else {
        StumpFit {
            stump: Stump::constant(first, Polarity::Negative),
            error: total_pos,
        }
    };
    if total_pos == 0.0 || total_neg == 0.0 {
        return constant;
    }

    let mut ordered: Vec<usize> = features.to_vec();
    ordered.sort_unstable();
    ordered.dedup();

    let per_feature: Vec<Option<StumpFit>> = ordered
        .par_iter()
        .map(|&feature| best_for_feature(set, weights, feature, total_pos, total_neg))
        .collect();

    let mut best = constant;
    for fit in per_feature.into_iter().flatten() {
        if fit.error < best.error {
            best = fit;
        }
    }
    best
}

fn best_for_feature(
    set: &TrainingSet,
    weights: &[f64],
    feature: usize,
    total_pos: f64,
    total_neg: f64,
) -> Option<StumpFit> {
    let column = set.column(feature);
    let labels = set.labels();
    let order = set.sorted_indices(feature);
    let total = total_pos + total_neg;

    // Error of "vote +1 when x >= threshold" with the threshold below every value.
    let mut err_positive = total_neg;
    let mut best: Option<StumpFit> = None;
    let mut k = 0;
    while k < order.len() {
        let value = column[order[k] as usize];
        while k < order.len() && column[order[k] as usize] == value {
            let i = order[k] as usize;
            if labels[i] {
                err_positive += weights[i];
            } else {
                err_positive -= weights[i];
            }
            k += 1;
        }
        if k == order.len() {
            break;
        }
        let next = column[order[k] as usize];
        let threshold = value + (next - value) / 2.0;
        let err_negative = total - err_positive;
        for (error, polarity) in [
            (err_positive, Polarity::Positive),
            (err_negative, Polarity::Negative),
        ] {
            if best.is_none_or(|b| error < b.error) {
                best = Some(StumpFit {
                    stump: Stump {
                        feature_index: feature,
                        threshold,
                        polarity,
                    },
                    error,
                });
            }
        }
    }
    best
}
