//! Attentional cascade of boosted classifiers.
//!
//! Each stage is an AdaBoost ensemble grown one stump at a time until, after
//! lowering its threshold to keep the per-stage detection rate at `d`, its
//! false-positive rate on surviving validation negatives is at most `f`.
//! Stages are added until the cumulative false-positive rate reaches the
//! target. Between stages the negative pool is refilled with the training
//! negatives the cascade still accepts.

use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boosting::{BoostError, Booster, StrongClassifier, TrainingSet};
use crate::featurization::FeatureVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CascadeError {
    #[error("invalid cascade parameters: {0}")]
    Config(String),
    #[error("degenerate training pools: {0}")]
    Pools(String),
    #[error("evaluation set must contain both classes")]
    SingleClassEval,
    #[error(transparent)]
    Boost(#[from] BoostError),
    #[error("cascade training halted after {} stage(s): {reason}", partial.stages.len())]
    Halted {
        partial: Box<CascadeModel>,
        log: Vec<StageLog>,
        reason: HaltReason,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HaltReason {
    MaxStages(usize),
    MaxStumps { stage: usize, stumps: usize },
    NoNegatives { stage: usize },
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HaltReason::MaxStages(n) => write!(
                f,
                "stage cap of {n} reached before the target false-positive rate"
            ),
            HaltReason::MaxStumps { stage, stumps } => {
                write!(f, "stage {stage} still above the per-stage false-positive bound at {stumps} stumps")
            }
            HaltReason::NoNegatives { stage } => {
                write!(f, "no training negatives survive into stage {stage}")
            }
        }
    }
}

/// Operator-chosen rate bounds. None of them has a default.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeParams {
    /// Maximum acceptable false-positive rate per stage (`f`).
    pub max_stage_fpr: f64,
    /// Minimum acceptable detection rate per stage (`d`).
    pub min_stage_tpr: f64,
    /// Overall false-positive target (`F_TGT`).
    pub target_fpr: f64,
}

impl CascadeParams {
    pub fn validate(&self) -> Result<(), CascadeError> {
        let open = |v: f64| v > 0.0 && v < 1.0;
        if !open(self.max_stage_fpr) {
            return Err(CascadeError::Config(format!(
                "f = {} not in (0, 1)",
                self.max_stage_fpr
            )));
        }
        if !(self.min_stage_tpr > 0.0 && self.min_stage_tpr <= 1.0) {
            return Err(CascadeError::Config(format!(
                "d = {} not in (0, 1]",
                self.min_stage_tpr
            )));
        }
        if !open(self.target_fpr) {
            return Err(CascadeError::Config(format!(
                "F_TGT = {} not in (0, 1)",
                self.target_fpr
            )));
        }
        Ok(())
    }
}

/// Stump count each stage starts from before growing one at a time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageBudget {
    /// `start`, `2 * start`, `4 * start`, ...
    Doubling { start: usize },
    /// Explicit per-stage counts; the last entry repeats.
    Fixed(Vec<usize>),
}

impl StageBudget {
    pub fn initial_stumps(&self, stage: usize, cap: usize) -> usize {
        let n = match self {
            StageBudget::Doubling { start } => {
                let shift = stage.min(usize::BITS as usize - 1) as u32;
                start.saturating_mul(1usize.checked_shl(shift).unwrap_or(usize::MAX))
            }
            StageBudget::Fixed(v) => v.get(stage).or(v.last()).copied().unwrap_or(1),
        };
        n.clamp(1, cap.max(1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeLimits {
    pub max_stages: usize,
    pub max_stumps_per_stage: usize,
    pub budget: StageBudget,
}

impl Default for CascadeLimits {
    fn default() -> Self {
        CascadeLimits {
            max_stages: 25,
            max_stumps_per_stage: 400,
            budget: StageBudget::Doubling { start: 2 },
        }
    }
}

/// Conditional rates of one stage, measured on the examples reaching it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRates {
    pub detection: f64,
    pub false_positive: f64,
    pub positives_in: u64,
    pub positives_passed: u64,
    pub negatives_in: u64,
    pub negatives_passed: u64,
}

impl StageRates {
    fn from_counts(
        positives_in: u64,
        positives_passed: u64,
        negatives_in: u64,
        negatives_passed: u64,
    ) -> Self {
        let ratio = |num: u64, den: u64| {
            if den == 0 {
                1.0
            } else {
                num as f64 / den as f64
            }
        };
        StageRates {
            detection: ratio(positives_passed, positives_in),
            false_positive: ratio(negatives_passed, negatives_in),
            positives_in,
            positives_passed,
            negatives_in,
            negatives_passed,
        }
    }

    /// Rates without counts, for summaries built from reported figures.
    pub fn from_rates(detection: f64, false_positive: f64) -> Self {
        StageRates {
            detection,
            false_positive,
            positives_in: 0,
            positives_passed: 0,
            negatives_in: 0,
            negatives_passed: 0,
        }
    }

    pub fn detection_ratio(&self) -> Ratio<u128> {
        exact_ratio(self.positives_passed, self.positives_in)
    }

    pub fn false_positive_ratio(&self) -> Ratio<u128> {
        exact_ratio(self.negatives_passed, self.negatives_in)
    }
}

fn exact_ratio(num: u64, den: u64) -> Ratio<u128> {
    if den == 0 {
        Ratio::from_integer(1)
    } else {
        Ratio::new(num as u128, den as u128)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeModel {
    pub stages: Vec<StrongClassifier>,
    pub stage_rates: Vec<StageRates>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<CascadeParams>,
}

impl CascadeModel {
    pub fn empty() -> Self {
        CascadeModel {
            stages: Vec::new(),
            stage_rates: Vec::new(),
            params: None,
        }
    }

    /// `D = prod d_i` over the recorded stage rates.
    pub fn overall_detection(&self) -> f64 {
        self.stage_rates.iter().map(|r| r.detection).product()
    }

    /// `F = prod f_i` over the recorded stage rates.
    pub fn overall_false_positive(&self) -> f64 {
        self.stage_rates.iter().map(|r| r.false_positive).product()
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// True when every stage accepts `x`; stops at the first rejection.
    pub fn predict_slice(&self, x: &[f64]) -> bool {
        self.stages.iter().all(|s| s.predict_slice(x))
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<bool, BoostError> {
        for stage in &self.stages {
            if !stage.predict(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Number of stages evaluated and the verdict.
    pub fn trace_slice(&self, x: &[f64]) -> (usize, bool) {
        for (i, stage) in self.stages.iter().enumerate() {
            if !stage.predict_slice(x) {
                return (i + 1, false);
            }
        }
        (self.stages.len(), true)
    }

    /// Real-valued score consistent with the cascade verdict, for ROC analysis:
    /// stages passed plus a logistic squash of the deciding stage's margin.
    /// Accepted inputs always outscore rejected ones.
    pub fn score_slice(&self, x: &[f64]) -> f64 {
        let n = self.stages.len();
        for (i, stage) in self.stages.iter().enumerate() {
            let margin = stage.score_slice(x) - stage.decision_threshold;
            if margin <= 0.0 || i + 1 == n {
                return i as f64 + logistic(margin);
            }
        }
        0.0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cascade serializes")
    }
}

fn logistic(m: f64) -> f64 {
    1.0 / (1.0 + (-m).exp())
}

/// Conditional per-stage and overall rates on a labeled set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeRates {
    pub stages: Vec<StageRates>,
    pub detection: f64,
    pub false_positive: f64,
    pub positives: u64,
    pub negatives: u64,
    pub positives_accepted: u64,
    pub negatives_accepted: u64,
}

impl CascadeRates {
    pub fn product_detection(&self) -> f64 {
        self.stages.iter().map(|r| r.detection).product()
    }

    pub fn product_false_positive(&self) -> f64 {
        self.stages.iter().map(|r| r.false_positive).product()
    }

    /// Checks `D = prod d_i` and `F = prod f_i` in exact rational arithmetic.
    pub fn product_identity_holds(&self) -> bool {
        let d: Ratio<u128> = self.stages.iter().map(|s| s.detection_ratio()).product();
        let f: Ratio<u128> = self
            .stages
            .iter()
            .map(|s| s.false_positive_ratio())
            .product();
        d == exact_ratio(self.positives_accepted, self.positives)
            && f == exact_ratio(self.negatives_accepted, self.negatives)
    }
}

pub fn cascade_rates(
    model: &CascadeModel,
    rows: &[&[f64]],
    labels: &[bool],
) -> Result<CascadeRates, CascadeError> {
    if rows.len() != labels.len() {
        return Err(BoostError::LengthMismatch {
            rows: rows.len(),
            labels: labels.len(),
        }
        .into());
    }
    let positives = labels.iter().filter(|l| **l).count() as u64;
    let negatives = labels.len() as u64 - positives;
    if positives == 0 || negatives == 0 {
        return Err(CascadeError::SingleClassEval);
    }
    let mut alive: Vec<usize> = (0..rows.len()).collect();
    let mut stages = Vec::with_capacity(model.stages.len());
    for stage in &model.stages {
        let (pos_in, neg_in) = count_classes(&alive, labels);
        alive.retain(|&i| stage.predict_slice(rows[i]));
        let (pos_out, neg_out) = count_classes(&alive, labels);
        stages.push(StageRates::from_counts(pos_in, pos_out, neg_in, neg_out));
    }
    let (pos_acc, neg_acc) = count_classes(&alive, labels);
    Ok(CascadeRates {
        stages,
        detection: pos_acc as f64 / positives as f64,
        false_positive: neg_acc as f64 / negatives as f64,
        positives,
        negatives,
        positives_accepted: pos_acc,
        negatives_accepted: neg_acc,
    })
}

fn count_classes(idx: &[usize], labels: &[bool]) -> (u64, u64) {
    let pos = idx.iter().filter(|&&i| labels[i]).count() as u64;
    (pos, idx.len() as u64 - pos)
}

/// Largest threshold keeping at least `ceil(d_target * m)` of the `m`
/// positive scores strictly above it.
pub fn threshold_for_detection(
    positive_scores: &[f64],
    d_target: f64,
) -> Result<f64, CascadeError> {
    if !(d_target > 0.0 && d_target <= 1.0) {
        return Err(CascadeError::Config(format!(
            "detection target {d_target} not in (0, 1]"
        )));
    }
    if positive_scores.is_empty() {
        return Err(CascadeError::Pools(
            "no validation positives to set a threshold".into(),
        ));
    }
    let mut sorted = positive_scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let m = sorted.len();
    let keep = ((d_target * m as f64) - 1e-9).ceil().clamp(1.0, m as f64) as usize;
    Ok(sorted[keep - 1].next_down())
}

/// Sets the stage threshold from its scores on validation positives and
/// returns the new value.
pub fn adjust_stage_threshold(
    stage: &mut StrongClassifier,
    positives: &[&[f64]],
    d_target: f64,
) -> Result<f64, CascadeError> {
    let scores: Vec<f64> = positives.iter().map(|x| stage.score_slice(x)).collect();
    let theta = threshold_for_detection(&scores, d_target)?;
    stage.decision_threshold = theta;
    Ok(theta)
}

/// Training positives, the true-negative pool, and a held-out validation split.
#[derive(Clone, Debug)]
pub struct TrainPools<'a> {
    pub positives: Vec<&'a [f64]>,
    pub negatives: Vec<&'a [f64]>,
    pub validation: Vec<(&'a [f64], bool)>,
}

impl TrainPools<'_> {
    fn validate(&self) -> Result<(), CascadeError> {
        if self.positives.is_empty() || self.negatives.is_empty() {
            return Err(CascadeError::Pools(
                "training needs positives and negatives".into(),
            ));
        }
        let val_pos = self.validation.iter().filter(|(_, y)| *y).count();
        if val_pos == 0 || val_pos == self.validation.len() {
            return Err(CascadeError::Pools(
                "validation split needs both classes".into(),
            ));
        }
        let key = |s: &&[f64]| s.as_ptr() as usize;
        let pos: HashSet<usize> = self.positives.iter().map(key).collect();
        if self.negatives.iter().any(|n| pos.contains(&key(n))) {
            return Err(CascadeError::Pools(
                "positive and negative pools overlap".into(),
            ));
        }
        let train: HashSet<usize> = pos
            .into_iter()
            .chain(self.negatives.iter().map(key))
            .collect();
        if self.validation.iter().any(|(v, _)| train.contains(&key(v))) {
            return Err(CascadeError::Pools(
                "validation rows also appear in training pools".into(),
            ));
        }
        Ok(())
    }
}

/// Per-stage progress record, also emitted through `log`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageLog {
    pub stage: usize,
    pub stumps: usize,
    pub threshold: f64,
    pub detection: f64,
    pub false_positive: f64,
    pub cumulative_detection: f64,
    pub cumulative_false_positive: f64,
    pub training_negatives: usize,
}

impl fmt::Display for StageLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stage={} stumps={} theta={:.6} d={:.4} f={:.4} D={:.6} F={:.6} negatives={}",
            self.stage,
            self.stumps,
            self.threshold,
            self.detection,
            self.false_positive,
            self.cumulative_detection,
            self.cumulative_false_positive,
            self.training_negatives
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CascadeTraining {
    pub model: CascadeModel,
    pub log: Vec<StageLog>,
}

pub fn train_cascade(
    pools: &TrainPools<'_>,
    params: CascadeParams,
    limits: &CascadeLimits,
) -> Result<CascadeTraining, CascadeError> {
    params.validate()?;
    pools.validate()?;
    if limits.max_stages == 0 || limits.max_stumps_per_stage == 0 {
        return Err(CascadeError::Config(
            "stage and stump caps must be positive".into(),
        ));
    }

    let mut model = CascadeModel {
        stages: Vec::new(),
        stage_rates: Vec::new(),
        params: Some(params),
    };
    let mut log = Vec::new();

    let val_pos: Vec<&[f64]> = pools
        .validation
        .iter()
        .filter(|(_, y)| *y)
        .map(|(x, _)| *x)
        .collect();
    let val_neg: Vec<&[f64]> = pools
        .validation
        .iter()
        .filter(|(_, y)| !*y)
        .map(|(x, _)| *x)
        .collect();
    let mut pos_alive: Vec<usize> = (0..val_pos.len()).collect();
    let mut neg_alive: Vec<usize> = (0..val_neg.len()).collect();

    let mut negatives: Vec<&[f64]> = pools.negatives.clone();
    let (mut big_d, mut big_f) = (1.0f64, 1.0f64);

    while big_f > params.target_fpr {
        let stage_idx = model.stages.len();
        if stage_idx == limits.max_stages {
            return Err(halt(model, log, HaltReason::MaxStages(limits.max_stages)));
        }
        if negatives.is_empty() {
            return Err(halt(
                model,
                log,
                HaltReason::NoNegatives {
                    stage: stage_idx + 1,
                },
            ));
        }

        let mut rows: Vec<&[f64]> = Vec::with_capacity(pools.positives.len() + negatives.len());
        rows.extend(pools.positives.iter().copied());
        rows.extend(negatives.iter().copied());
        let mut labels = vec![true; pools.positives.len()];
        labels.resize(rows.len(), false);
        let set = TrainingSet::from_rows(&rows, &labels)?;
        let mut booster = Booster::new(&set, None)?;

        let initial = limits
            .budget
            .initial_stumps(stage_idx, limits.max_stumps_per_stage);
        let mut pos_scores = vec![0.0; pos_alive.len()];
        let mut neg_scores = vec![0.0; neg_alive.len()];
        let mut stumps = 0;
        let (stage, theta, stage_fpr) = loop {
            stumps += 1;
            let round = booster.step();
            for (s, &i) in pos_scores.iter_mut().zip(&pos_alive) {
                *s += round.alpha * round.stump.vote(val_pos[i]);
            }
            for (s, &i) in neg_scores.iter_mut().zip(&neg_alive) {
                *s += round.alpha * round.stump.vote(val_neg[i]);
            }
            if stumps < initial {
                continue;
            }
            let theta = threshold_for_detection(&pos_scores, params.min_stage_tpr)?;
            let passed = neg_scores.iter().filter(|s| **s > theta).count();
            let stage_fpr = if neg_scores.is_empty() {
                0.0
            } else {
                passed as f64 / neg_scores.len() as f64
            };
            if stage_fpr <= params.max_stage_fpr || stumps >= limits.max_stumps_per_stage {
                let mut stage = booster.classifier();
                stage.decision_threshold = theta;
                break (stage, theta, stage_fpr);
            }
        };
        let converged = stage_fpr <= params.max_stage_fpr;

        let pos_in = pos_alive.len() as u64;
        let neg_in = neg_alive.len() as u64;
        pos_alive = pos_alive
            .into_iter()
            .zip(&pos_scores)
            .filter(|(_, s)| **s > theta)
            .map(|(i, _)| i)
            .collect();
        neg_alive = neg_alive
            .into_iter()
            .zip(&neg_scores)
            .filter(|(_, s)| **s > theta)
            .map(|(i, _)| i)
            .collect();
        let rates = StageRates::from_counts(
            pos_in,
            pos_alive.len() as u64,
            neg_in,
            neg_alive.len() as u64,
        );
        big_d *= rates.detection;
        big_f *= rates.false_positive;

        let entry = StageLog {
            stage: stage_idx + 1,
            stumps,
            threshold: theta,
            detection: rates.detection,
            false_positive: rates.false_positive,
            cumulative_detection: big_d,
            cumulative_false_positive: big_f,
            training_negatives: negatives.len(),
        };
        log::info!("{entry}");
        log.push(entry);
        model.stages.push(stage);
        model.stage_rates.push(rates);

        if !converged {
            return Err(halt(
                model,
                log,
                HaltReason::MaxStumps {
                    stage: stage_idx + 1,
                    stumps: limits.max_stumps_per_stage,
                },
            ));
        }

        negatives.clear();
        if big_f > params.target_fpr {
            negatives = pools
                .negatives
                .iter()
                .copied()
                .filter(|x| model.predict_slice(x))
                .collect();
        }
    }
    Ok(CascadeTraining { model, log })
}

fn halt(model: CascadeModel, log: Vec<StageLog>, reason: HaltReason) -> CascadeError {
    log::warn!("cascade training halted: {reason}");
    CascadeError::Halted {
        partial: Box::new(model),
        log,
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boosting::{Polarity, Stump, WeightedStump};

    fn stump_stage(feature: usize, threshold: f64) -> StrongClassifier {
        let mut c = StrongClassifier::new(2);
        c.stages.push(WeightedStump {
            alpha: 1.0,
            stump: Stump {
                feature_index: feature,
                threshold,
                polarity: Polarity::Positive,
            },
        });
        c
    }

    #[test]
    fn empty_cascade_accepts() {
        assert!(CascadeModel::empty().predict_slice(&[0.0, 0.0]));
        assert_eq!(CascadeModel::empty().overall_detection(), 1.0);
    }

    #[test]
    fn absorbing_negative_stage() {
        let mut blocker = stump_stage(0, 0.5);
        blocker.decision_threshold = f64::INFINITY;
        let model = CascadeModel {
            stages: vec![stump_stage(1, 0.5), blocker],
            stage_rates: vec![],
            params: None,
        };
        for x in [[0.0, 0.0], [1.0, 1.0], [5.0, -3.0]] {
            assert!(!model.predict_slice(&x));
        }
    }

    #[test]
    fn second_stage_rejects() {
        let model = CascadeModel {
            stages: vec![stump_stage(0, 0.5), stump_stage(1, 0.5)],
            stage_rates: vec![],
            params: None,
        };
        assert_eq!(model.trace_slice(&[1.0, 0.0]), (2, false));
        assert_eq!(model.trace_slice(&[0.0, 1.0]), (1, false));
        assert_eq!(model.trace_slice(&[1.0, 1.0]), (2, true));
    }

    #[test]
    fn independent_halves_multiply() {
        // negatives spread evenly over the four (x0, x1) cells; positives all in (1, 1)
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for _ in 0..5 {
                    rows.push(vec![a as f64, b as f64]);
                    labels.push(false);
                }
            }
        }
        for _ in 0..4 {
            rows.push(vec![1.0, 1.0]);
            labels.push(true);
        }
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let model = CascadeModel {
            stages: vec![stump_stage(0, 0.5), stump_stage(1, 0.5)],
            stage_rates: vec![],
            params: None,
        };
        let rates = cascade_rates(&model, &refs, &labels).unwrap();
        assert_eq!(rates.stages[0].false_positive, 0.5);
        assert_eq!(rates.stages[1].false_positive, 0.5);
        assert_eq!(rates.false_positive, 0.25);
        assert_eq!(rates.detection, 1.0);
        assert!(rates.product_identity_holds());
    }

    #[test]
    fn all_accepting_stages_give_unit_rates() {
        let rows = [vec![1.0, 1.0], vec![2.0, 2.0]];
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let model = CascadeModel {
            stages: vec![stump_stage(0, 0.5); 3],
            stage_rates: vec![],
            params: None,
        };
        let rates = cascade_rates(&model, &refs, &[true, false]).unwrap();
        assert_eq!((rates.detection, rates.false_positive), (1.0, 1.0));
        assert!(cascade_rates(&model, &refs, &[true, true]).is_err());
    }

    #[test]
    fn threshold_quantiles() {
        let scores: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let theta = threshold_for_detection(&scores, 1.0).unwrap();
        assert!(theta < 1.0 && theta.next_up() == 1.0);
        let theta = threshold_for_detection(&scores, 0.95).unwrap();
        assert_eq!(scores.iter().filter(|s| **s > theta).count(), 95);
        let theta = threshold_for_detection(&scores, 0.5).unwrap();
        assert!((theta - 51.0).abs() < 1e-9);
        assert!(threshold_for_detection(&scores, 0.0).is_err());
        assert!(threshold_for_detection(&scores, 1.01).is_err());
        assert!(threshold_for_detection(&[], 0.9).is_err());
    }

    #[test]
    fn params_are_validated() {
        let ok = CascadeParams {
            max_stage_fpr: 0.5,
            min_stage_tpr: 0.95,
            target_fpr: 0.01,
        };
        ok.validate().unwrap();
        assert!(CascadeParams {
            max_stage_fpr: 1.0,
            ..ok
        }
        .validate()
        .is_err());
        assert!(CascadeParams {
            min_stage_tpr: 0.0,
            ..ok
        }
        .validate()
        .is_err());
        assert!(CascadeParams {
            target_fpr: 0.0,
            ..ok
        }
        .validate()
        .is_err());
    }

    #[test]
    fn budget_schedule() {
        let b = StageBudget::Doubling { start: 2 };
        let got: Vec<usize> = (0..10).map(|i| b.initial_stumps(i, 400)).collect();
        assert_eq!(got, vec![2, 4, 8, 16, 32, 64, 128, 256, 400, 400]);
        let b = StageBudget::Fixed(vec![1, 3]);
        assert_eq!(b.initial_stumps(5, 400), 3);
    }
}
