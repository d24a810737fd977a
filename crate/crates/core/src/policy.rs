//! Per-auction reserve decisions.
//!
//! An auction gets a raised hard reserve only when the separation classifier
//! predicts a wide top-two gap and the high-value cascade accepts it. The
//! reserve is then the floor of the predicted top-bid bucket (optionally moved
//! into the bucket), and only applied when it beats the static reserve.

use std::io::Write;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::auction::effective_static_reserve;
use crate::boosting::{
    adaboost_train, compute_alpha, roc_auc, BoostError, Polarity, StrongClassifier, Stump,
    TrainingSet, WeightedStump, EPSILON_FLOOR,
};
use crate::cascade::{
    cascade_rates, train_cascade, CascadeError, CascadeLimits, CascadeModel, CascadeParams,
    CascadeRates, HaltReason, StageLog, TrainPools,
};
use crate::featurization::{
    label_records, BucketSchema, BuyerGroupMap, FeatureError, FeatureSchema, FitOptions, RawRecord,
};
use crate::money::Money;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Boost(#[from] BoostError),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error("{model}: labels have a single class ({positives} positives of {n})")]
    SingleClass {
        model: &'static str,
        n: usize,
        positives: usize,
    },
    #[error("invalid policy configuration: {0}")]
    Config(String),
    #[error("bucket predictor does not cover bucket {0}")]
    MissingBucket(usize),
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionReason {
    NotSeparated,
    NotHighValue,
    BucketFloorNotAboveStatic,
    Applied,
}

impl DecisionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DecisionReason::NotSeparated => "not_separated",
            DecisionReason::NotHighValue => "not_high_value",
            DecisionReason::BucketFloorNotAboveStatic => "bucket_floor_not_above_static",
            DecisionReason::Applied => "applied",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReserveDecision {
    pub changed: bool,
    /// Reserve to apply; the static effective reserve unless `changed`.
    pub reserve: Money,
    pub reason: DecisionReason,
    pub static_reserve: Money,
    /// `None` when the gate was not evaluated.
    pub separation_margin: Option<f64>,
    pub cascade_passed: Option<bool>,
    pub predicted_bucket: Option<usize>,
}

impl ReserveDecision {
    pub fn unchanged(static_reserve: Money, reason: DecisionReason) -> Self {
        ReserveDecision {
            changed: false,
            reserve: static_reserve,
            reason,
            static_reserve,
            separation_margin: None,
            cascade_passed: None,
            predicted_bucket: None,
        }
    }
}

/// Anything that can pick a hard reserve for a logged auction.
pub trait ReservePolicy: Sync {
    fn decide(&self, record: &RawRecord) -> Result<ReserveDecision, PolicyError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateOrder {
    #[default]
    SeparationFirst,
    HighValueFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    /// Position inside the predicted bucket: 0 is the floor, 1 the ceiling.
    pub bucket_position: f64,
    pub gate_order: GateOrder,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            bucket_position: 0.0,
            gate_order: GateOrder::SeparationFirst,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if !(0.0..=1.0).contains(&self.bucket_position) {
            return Err(PolicyError::Config(format!(
                "bucket position {} not in [0, 1]",
                self.bucket_position
            )));
        }
        Ok(())
    }
}

/// One-vs-rest classifiers over the high-value buckets, ascending by bucket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BucketPredictor {
    pub buckets: Vec<(usize, StrongClassifier)>,
}

impl BucketPredictor {
    /// Bucket with the largest margin; exact ties go to the lower bucket.
    pub fn predict_slice(&self, x: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (bucket, clf) in &self.buckets {
            let score = clf.score_slice(x);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((*bucket, score));
            }
        }
        best.map(|(b, _)| b)
    }

    pub fn covers(&self, buckets: std::ops::Range<usize>) -> Result<(), PolicyError> {
        for b in buckets {
            if !self.buckets.iter().any(|(id, _)| *id == b) {
                return Err(PolicyError::MissingBucket(b));
            }
        }
        Ok(())
    }
}

/// Gate evaluation counts, for checking short-circuit behavior.
#[derive(Debug, Default)]
pub struct EvalCounters {
    pub separation: AtomicU64,
    pub cascade: AtomicU64,
    pub bucket: AtomicU64,
}

impl EvalCounters {
    pub fn snapshot(&self) -> (u64, u64, u64) {
        (
            self.separation.load(Ordering::Relaxed),
            self.cascade.load(Ordering::Relaxed),
            self.bucket.load(Ordering::Relaxed),
        )
    }
}

impl Clone for EvalCounters {
    fn clone(&self) -> Self {
        let (s, c, b) = self.snapshot();
        EvalCounters {
            separation: AtomicU64::new(s),
            cascade: AtomicU64::new(c),
            bucket: AtomicU64::new(b),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolicyModels {
    pub feature_schema: FeatureSchema,
    pub buckets: BucketSchema,
    pub separation: StrongClassifier,
    pub high_value: CascadeModel,
    pub bucket_predictor: BucketPredictor,
    pub config: PolicyConfig,
    #[serde(skip)]
    pub counters: EvalCounters,
}

impl PolicyModels {
    pub fn validate(&self) -> Result<(), PolicyError> {
        self.feature_schema.verify_id()?;
        self.buckets.validate()?;
        self.config.validate()?;
        self.bucket_predictor
            .covers(self.buckets.high_value_buckets())?;
        let dim = self.feature_schema.dimension();
        let classifiers = std::iter::once(&self.separation)
            .chain(self.high_value.stages.iter())
            .chain(self.bucket_predictor.buckets.iter().map(|(_, c)| c));
        for c in classifiers {
            if c.dimension != dim {
                return Err(BoostError::Dimension {
                    expected: dim,
                    found: c.dimension,
                }
                .into());
            }
            if let Some(id) = c.schema_id {
                if id != self.feature_schema.id {
                    return Err(BoostError::Schema {
                        expected: self.feature_schema.id,
                        found: id,
                    }
                    .into());
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("policy serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, PolicyError> {
        let models: PolicyModels =
            serde_json::from_str(s).map_err(|e| PolicyError::Io(e.to_string()))?;
        models.validate()?;
        Ok(models)
    }

    /// Pipeline on an already-encoded auction.
    pub fn decide_encoded(
        &self,
        x: &[f64],
        static_reserve: Money,
    ) -> Result<ReserveDecision, PolicyError> {
        let mut decision = ReserveDecision::unchanged(static_reserve, DecisionReason::Applied);
        let separation_gate = |d: &mut ReserveDecision| {
            self.counters.separation.fetch_add(1, Ordering::Relaxed);
            let margin = self.separation.score_slice(x);
            d.separation_margin = Some(margin);
            margin > self.separation.decision_threshold
        };
        let cascade_gate = |d: &mut ReserveDecision| {
            self.counters.cascade.fetch_add(1, Ordering::Relaxed);
            let passed = self.high_value.predict_slice(x);
            d.cascade_passed = Some(passed);
            passed
        };
        let gates: [(&dyn Fn(&mut ReserveDecision) -> bool, DecisionReason); 2] =
            match self.config.gate_order {
                GateOrder::SeparationFirst => [
                    (&separation_gate, DecisionReason::NotSeparated),
                    (&cascade_gate, DecisionReason::NotHighValue),
                ],
                GateOrder::HighValueFirst => [
                    (&cascade_gate, DecisionReason::NotHighValue),
                    (&separation_gate, DecisionReason::NotSeparated),
                ],
            };
        for (gate, reason) in gates {
            if !gate(&mut decision) {
                decision.reason = reason;
                return Ok(decision);
            }
        }

        self.counters.bucket.fetch_add(1, Ordering::Relaxed);
        let bucket = self
            .bucket_predictor
            .predict_slice(x)
            .ok_or_else(|| PolicyError::Config("bucket predictor is empty".into()))?;
        decision.predicted_bucket = Some(bucket);
        let floor = self.buckets.bucket_floor(bucket)?;
        let ceiling = self.buckets.bucket_ceiling(bucket)?;
        let reserve = floor.interpolate(ceiling, self.config.bucket_position);
        if reserve <= static_reserve {
            decision.reason = DecisionReason::BucketFloorNotAboveStatic;
            return Ok(decision);
        }
        decision.changed = true;
        decision.reserve = reserve;
        Ok(decision)
    }

    pub fn encode(&self, record: &RawRecord) -> Result<Vec<f64>, PolicyError> {
        let mut x = vec![0.0; self.feature_schema.dimension()];
        self.feature_schema.encode_into(record, &mut x)?;
        Ok(x)
    }
}

impl ReservePolicy for PolicyModels {
    fn decide(&self, record: &RawRecord) -> Result<ReserveDecision, PolicyError> {
        recommend_reserve(record, self)
    }
}

pub fn predict_top_bucket(models: &PolicyModels, x: &[f64]) -> Option<usize> {
    models.bucket_predictor.predict_slice(x)
}

pub fn bucket_floor(bucket: usize, schema: &BucketSchema) -> Result<Money, PolicyError> {
    Ok(schema.bucket_floor(bucket)?)
}

pub fn recommend_reserve(
    record: &RawRecord,
    models: &PolicyModels,
) -> Result<ReserveDecision, PolicyError> {
    let x = models.encode(record)?;
    models.decide_encoded(&x, effective_static_reserve(&record.reserves))
}

/// Reserve := true top bid on the auctions selected by `scope`, whenever that
/// beats the static reserve. Upper-bounds any policy that only raises
/// reserves on the same auctions.
#[derive(Clone, Debug)]
pub struct OraclePolicy {
    pub buckets: BucketSchema,
    pub scope: OracleScope,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleScope {
    /// Truly high-value and truly separated auctions.
    SeparatedHighValue,
    /// Every truly high-value auction.
    HighValue,
    All,
}

impl ReservePolicy for OraclePolicy {
    fn decide(&self, record: &RawRecord) -> Result<ReserveDecision, PolicyError> {
        let static_reserve = effective_static_reserve(&record.reserves);
        let bids = &record.bids;
        let separated = self.buckets.is_separated(bids);
        let high = self.buckets.is_high_value(bids);
        let selected = match self.scope {
            OracleScope::SeparatedHighValue => separated && high,
            OracleScope::HighValue => high,
            OracleScope::All => true,
        };
        if !selected {
            let reason = if high {
                DecisionReason::NotSeparated
            } else {
                DecisionReason::NotHighValue
            };
            return Ok(ReserveDecision::unchanged(static_reserve, reason));
        }
        if bids.top() <= static_reserve {
            return Ok(ReserveDecision::unchanged(
                static_reserve,
                DecisionReason::BucketFloorNotAboveStatic,
            ));
        }
        let mut d = ReserveDecision::unchanged(static_reserve, DecisionReason::Applied);
        d.changed = true;
        d.reserve = bids.top();
        Ok(d)
    }
}

/// Everything needed to fit the three model families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub buckets: BucketSchema,
    pub cascade: CascadeParams,
    pub limits: CascadeLimits,
    pub separation_rounds: usize,
    pub bucket_rounds: usize,
    pub fit: FitOptions,
    pub policy: PolicyConfig,
}

impl TrainOptions {
    pub fn new(buckets: BucketSchema, cascade: CascadeParams) -> Self {
        TrainOptions {
            buckets,
            cascade,
            limits: CascadeLimits::default(),
            separation_rounds: 40,
            bucket_rounds: 20,
            fit: FitOptions::default(),
            policy: PolicyConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PolicyTraining {
    pub models: PolicyModels,
    pub cascade_log: Vec<StageLog>,
    /// Set when the cascade stopped at a safety cap; the partial cascade is used.
    pub cascade_halt: Option<HaltReason>,
}

/// Fits the feature schema on `train`, then the separation classifier, the
/// high-value cascade (validated on `validation`) and the bucket predictor.
pub fn train_policy(
    train: &[RawRecord],
    validation: &[RawRecord],
    buyer_groups: BuyerGroupMap,
    options: &TrainOptions,
) -> Result<PolicyTraining, PolicyError> {
    options.buckets.validate()?;
    options.cascade.validate()?;
    options.policy.validate()?;

    let schema = FeatureSchema::fit(train, buyer_groups, options.fit);
    let encode = |records: &[RawRecord]| -> Result<Vec<Vec<f64>>, PolicyError> {
        Ok(schema
            .encode_all(records)?
            .into_iter()
            .map(|v| v.values)
            .collect())
    };
    let train_x = encode(train)?;
    let val_x = encode(validation)?;
    let train_labels = label_records(train, &options.buckets);
    let val_labels = label_records(validation, &options.buckets);

    let sep_y: Vec<bool> = train_labels.iter().map(|l| l.separation).collect();
    require_both(&sep_y, "separation classifier")?;
    let sep_set = TrainingSet::from_rows(&train_x, &sep_y)?;
    let separation =
        adaboost_train(&sep_set, options.separation_rounds, None)?.with_schema(schema.id);
    drop(sep_set);

    let hv_y: Vec<bool> = train_labels.iter().map(|l| l.high_value).collect();
    require_both(&hv_y, "high-value cascade")?;
    let val_hv: Vec<bool> = val_labels.iter().map(|l| l.high_value).collect();
    require_both(&val_hv, "high-value validation split")?;
    let pools = TrainPools {
        positives: train_x
            .iter()
            .zip(&hv_y)
            .filter(|(_, y)| **y)
            .map(|(x, _)| x.as_slice())
            .collect(),
        negatives: train_x
            .iter()
            .zip(&hv_y)
            .filter(|(_, y)| !**y)
            .map(|(x, _)| x.as_slice())
            .collect(),
        validation: val_x
            .iter()
            .zip(&val_hv)
            .map(|(x, y)| (x.as_slice(), *y))
            .collect(),
    };
    let (mut high_value, cascade_log, cascade_halt) =
        match train_cascade(&pools, options.cascade, &options.limits) {
            Ok(t) => (t.model, t.log, None),
            Err(CascadeError::Halted {
                partial,
                log,
                reason,
            }) => (*partial, log, Some(reason)),
            Err(e) => return Err(e.into()),
        };
    for stage in &mut high_value.stages {
        stage.schema_id = Some(schema.id);
    }

    let hv_rows: Vec<&[f64]> = train_x
        .iter()
        .zip(&hv_y)
        .filter(|(_, y)| **y)
        .map(|(x, _)| x.as_slice())
        .collect();
    let hv_buckets: Vec<usize> = train_labels
        .iter()
        .filter(|l| l.high_value)
        .map(|l| l.top_bucket)
        .collect();
    let dim = schema.dimension();
    let bucket_ids: Vec<usize> = options.buckets.high_value_buckets().collect();
    let trained: Vec<Result<(usize, StrongClassifier), PolicyError>> = bucket_ids
        .par_iter()
        .map(|&b| {
            let y: Vec<bool> = hv_buckets.iter().map(|tb| *tb == b).collect();
            let positives = y.iter().filter(|v| **v).count();
            let clf = if positives == 0 || positives == y.len() {
                constant_classifier(dim, positives > 0)
            } else {
                let set = TrainingSet::from_rows(&hv_rows, &y)?;
                adaboost_train(&set, options.bucket_rounds, None)?
            };
            Ok((b, clf.with_schema(schema.id)))
        })
        .collect();
    let buckets = trained.into_iter().collect::<Result<Vec<_>, _>>()?;

    let models = PolicyModels {
        feature_schema: schema,
        buckets: options.buckets.clone(),
        separation,
        high_value,
        bucket_predictor: BucketPredictor { buckets },
        config: options.policy,
        counters: EvalCounters::default(),
    };
    Ok(PolicyTraining {
        models,
        cascade_log,
        cascade_halt,
    })
}

fn require_both(labels: &[bool], model: &'static str) -> Result<(), PolicyError> {
    let positives = labels.iter().filter(|l| **l).count();
    if positives == 0 || positives == labels.len() {
        return Err(PolicyError::SingleClass {
            model,
            n: labels.len(),
            positives,
        });
    }
    Ok(())
}

/// Single clamped-error stump voting the same way everywhere.
fn constant_classifier(dimension: usize, positive: bool) -> StrongClassifier {
    let polarity = if positive {
        Polarity::Positive
    } else {
        Polarity::Negative
    };
    let mut c = StrongClassifier::new(dimension);
    c.stages.push(WeightedStump {
        alpha: compute_alpha(EPSILON_FLOOR).expect("floor is inside (0, 1)"),
        stump: Stump::constant(0, polarity),
    });
    c.training_errors.push(EPSILON_FLOOR);
    c
}

/// Held-out quality of the trained models.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolicyEvaluation {
    pub records: usize,
    pub separation_auc: f64,
    pub separation_error: f64,
    pub separation_error_bound: f64,
    pub high_value_auc: f64,
    pub stage_aucs: Vec<f64>,
    pub cascade: CascadeRates,
    pub bucket_accuracy: f64,
}

pub fn evaluate_policy(
    models: &PolicyModels,
    records: &[RawRecord],
) -> Result<PolicyEvaluation, PolicyError> {
    let xs: Vec<Vec<f64>> = records
        .par_iter()
        .map(|r| models.encode(r))
        .collect::<Result<_, _>>()?;
    let labels = label_records(records, &models.buckets);
    let sep_y: Vec<bool> = labels.iter().map(|l| l.separation).collect();
    let hv_y: Vec<bool> = labels.iter().map(|l| l.high_value).collect();

    let sep_scores: Vec<f64> = xs
        .iter()
        .map(|x| models.separation.score_slice(x))
        .collect();
    let separation_auc = roc_auc(&sep_scores, &sep_y)?;
    let wrong = xs
        .iter()
        .zip(&sep_y)
        .filter(|(x, y)| models.separation.predict_slice(x) != **y)
        .count();

    let hv_scores: Vec<f64> = xs
        .iter()
        .map(|x| models.high_value.score_slice(x))
        .collect();
    let high_value_auc = roc_auc(&hv_scores, &hv_y)?;
    let stage_aucs = models
        .high_value
        .stages
        .iter()
        .map(|s| {
            roc_auc(
                &xs.iter().map(|x| s.score_slice(x)).collect::<Vec<_>>(),
                &hv_y,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&[f64]> = xs.iter().map(|x| x.as_slice()).collect();
    let cascade = cascade_rates(&models.high_value, &refs, &hv_y)?;

    let (mut hits, mut total) = (0usize, 0usize);
    for (x, l) in xs.iter().zip(&labels) {
        if l.high_value {
            total += 1;
            if models.bucket_predictor.predict_slice(x) == Some(l.top_bucket) {
                hits += 1;
            }
        }
    }
    Ok(PolicyEvaluation {
        records: records.len(),
        separation_auc,
        separation_error: wrong as f64 / records.len().max(1) as f64,
        separation_error_bound: models.separation.training_error_bound(),
        high_value_auc,
        stage_aucs,
        cascade,
        bucket_accuracy: if total == 0 {
            0.0
        } else {
            hits as f64 / total as f64
        },
    })
}

/// Decision log CSV, one row per auction.
pub fn write_decision_log<W: Write>(
    writer: W,
    decisions: &[(u64, ReserveDecision)],
) -> Result<(), PolicyError> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| PolicyError::Io(e.to_string());
    w.write_record([
        "record_id",
        "reason",
        "static_reserve",
        "recommended_reserve",
        "predicted_bucket",
        "separation_margin",
        "cascade_passed",
    ])
    .map_err(io)?;
    for (id, d) in decisions {
        w.write_record([
            id.to_string(),
            d.reason.as_str().to_string(),
            d.static_reserve.to_string(),
            d.reserve.to_string(),
            d.predicted_bucket
                .map(|b| b.to_string())
                .unwrap_or_default(),
            d.separation_margin
                .map(|m| m.to_string())
                .unwrap_or_default(),
            d.cascade_passed.map(|p| p.to_string()).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| PolicyError::Io(e.to_string()))?;
    Ok(())
}
