//! Discrete AdaBoost over decision stumps.
//!
//! Rounds: start from uniform weights, fit the stump with the least weighted
//! error, set `alpha = ln((1 - eps) / eps) / 2`, reweight by
//! `exp(-alpha * y * h(x))`, renormalize.

use super::dataset::TrainingSet;
use super::strong::{StrongClassifier, WeightedStump};
use super::stump::{train_stump, weighted_error, Stump};
use super::BoostError;

/// Errors are clamped into this band before computing `alpha`.
pub const EPSILON_FLOOR: f64 = 1e-10;
pub const EPSILON_CEIL: f64 = 1.0 - 1e-10;

pub fn compute_alpha(epsilon: f64) -> Result<f64, BoostError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(BoostError::EpsilonDomain(epsilon));
    }
    Ok(0.5 * ((1.0 - epsilon) / epsilon).ln())
}

pub fn clamp_epsilon(epsilon: f64) -> f64 {
    epsilon.clamp(EPSILON_FLOOR, EPSILON_CEIL)
}

/// Bookkeeping for one boosting round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoostRound {
    pub stump: Stump,
    pub alpha: f64,
    /// Weighted error by direct evaluation, before clamping.
    pub raw_epsilon: f64,
    pub epsilon: f64,
    /// Weight carried by the examples `stump` misclassifies, after the update.
    pub misclassified_weight_after: f64,
    /// Sum of weights after renormalization.
    pub weight_sum_after: f64,
}

impl BoostRound {
    pub fn was_clamped(&self) -> bool {
        self.raw_epsilon != self.epsilon
    }
}

/// Incremental AdaBoost state. Each [`Booster::step`] adds one round, so
/// growing a classifier from `C` to `C + 1` stumps reuses the first `C`.
#[derive(Debug)]
pub struct Booster<'a> {
    set: &'a TrainingSet,
    feature_subset: Option<Vec<usize>>,
    weights: Vec<f64>,
    margins: Vec<f64>,
    rounds: Vec<BoostRound>,
}

impl<'a> Booster<'a> {
    pub fn new(
        set: &'a TrainingSet,
        feature_subset: Option<Vec<usize>>,
    ) -> Result<Self, BoostError> {
        if set.is_empty() {
            return Err(BoostError::Empty);
        }
        if !set.has_both_classes() {
            return Err(BoostError::SingleClass {
                n: set.len(),
                positives: set.positives(),
            });
        }
        if let Some(subset) = &feature_subset {
            if subset.is_empty() {
                return Err(BoostError::EmptyFeatureSubset);
            }
            if let Some(bad) = subset.iter().find(|f| **f >= set.dimension()) {
                return Err(BoostError::Dimension {
                    expected: set.dimension(),
                    found: *bad + 1,
                });
            }
        }
        let n = set.len();
        Ok(Booster {
            set,
            feature_subset,
            weights: vec![1.0 / n as f64; n],
            margins: vec![0.0; n],
            rounds: Vec::new(),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rounds(&self) -> &[BoostRound] {
        &self.rounds
    }

    /// Training margins `sum alpha_t h_t(x_i)` so far.
    pub fn margins(&self) -> &[f64] {
        &self.margins
    }

    pub fn step(&mut self) -> BoostRound {
        let fit = train_stump(self.set, &self.weights, self.feature_subset.as_deref());
        let stump = fit.stump;
        let raw_epsilon = weighted_error(self.set, &self.weights, &stump);
        let epsilon = clamp_epsilon(raw_epsilon);
        let alpha = compute_alpha(epsilon).expect("clamped epsilon is in (0, 1)");

        let column = self.set.column(stump.feature_index);
        let labels = self.set.labels();
        let shrink = (-alpha).exp();
        let grow = alpha.exp();
        let mut total = 0.0;
        for i in 0..self.weights.len() {
            let vote = stump.vote_value(column[i]);
            let y = if labels[i] { 1.0 } else { -1.0 };
            self.margins[i] += alpha * vote;
            self.weights[i] *= if vote == y { shrink } else { grow };
            total += self.weights[i];
        }
        let mut misclassified = 0.0;
        let mut sum = 0.0;
        for i in 0..self.weights.len() {
            self.weights[i] /= total;
            sum += self.weights[i];
            if (stump.vote_value(column[i]) > 0.0) != labels[i] {
                misclassified += self.weights[i];
            }
        }
        let round = BoostRound {
            stump,
            alpha,
            raw_epsilon,
            epsilon,
            misclassified_weight_after: misclassified,
            weight_sum_after: sum,
        };
        self.rounds.push(round);
        round
    }

    /// Fraction of training examples the current ensemble (threshold 0) gets wrong.
    pub fn training_error(&self) -> f64 {
        let wrong = self
            .margins
            .iter()
            .zip(self.set.labels())
            .filter(|(m, y)| (**m > 0.0) != **y)
            .count();
        wrong as f64 / self.margins.len() as f64
    }

    pub fn classifier(&self) -> StrongClassifier {
        let mut c = StrongClassifier::new(self.set.dimension());
        for r in &self.rounds {
            c.stages.push(WeightedStump {
                alpha: r.alpha,
                stump: r.stump,
            });
            c.training_errors.push(r.epsilon);
        }
        c
    }
}

/// Runs `rounds` rounds of AdaBoost and returns the ensemble with threshold 0.
pub fn adaboost_train(
    set: &TrainingSet,
    rounds: usize,
    feature_subset: Option<Vec<usize>>,
) -> Result<StrongClassifier, BoostError> {
    if rounds == 0 {
        return Err(BoostError::NoRounds);
    }
    let mut booster = Booster::new(set, feature_subset)?;
    for _ in 0..rounds {
        booster.step();
    }
    Ok(booster.classifier())
}
