use serde::{Deserialize, Serialize};

use super::stump::{Polarity, Stump};
use super::BoostError;
use crate::featurization::{FeatureVector, SchemaId};

/// One boosted stage: `alpha * h(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    into = "(f64, usize, f64, Polarity)",
    from = "(f64, usize, f64, Polarity)"
)]
pub struct WeightedStump {
    pub alpha: f64,
    pub stump: Stump,
}

impl From<WeightedStump> for (f64, usize, f64, Polarity) {
    fn from(w: WeightedStump) -> Self {
        (
            w.alpha,
            w.stump.feature_index,
            w.stump.threshold,
            w.stump.polarity,
        )
    }
}

impl From<(f64, usize, f64, Polarity)> for WeightedStump {
    fn from((alpha, feature_index, threshold, polarity): (f64, usize, f64, Polarity)) -> Self {
        WeightedStump {
            alpha,
            stump: Stump {
                feature_index,
                threshold,
                polarity,
            },
        }
    }
}

/// Weighted stump vote with a decision threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongClassifier {
    pub stages: Vec<WeightedStump>,
    pub decision_threshold: f64,
    /// Clamped weighted error of each round.
    pub training_errors: Vec<f64>,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_id: Option<SchemaId>,
}

impl StrongClassifier {
    pub fn new(dimension: usize) -> Self {
        StrongClassifier {
            stages: Vec::new(),
            decision_threshold: 0.0,
            training_errors: Vec::new(),
            dimension,
            schema_id: None,
        }
    }

    pub fn with_schema(mut self, schema_id: SchemaId) -> Self {
        self.schema_id = Some(schema_id);
        self
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Margin `sum alpha_t * h_t(x)` without validation; panics when a stump
    /// indexes past `x`.
    #[inline]
    pub fn score_slice(&self, x: &[f64]) -> f64 {
        self.stages.iter().map(|s| s.alpha * s.stump.vote(x)).sum()
    }

    #[inline]
    pub fn predict_slice(&self, x: &[f64]) -> bool {
        self.score_slice(x) > self.decision_threshold
    }

    fn check(&self, x: &FeatureVector) -> Result<(), BoostError> {
        if x.values.len() != self.dimension {
            return Err(BoostError::Dimension {
                expected: self.dimension,
                found: x.values.len(),
            });
        }
        if let Some(id) = self.schema_id {
            if id != x.schema_id {
                return Err(BoostError::Schema {
                    expected: id,
                    found: x.schema_id,
                });
            }
        }
        Ok(())
    }

    pub fn score(&self, x: &FeatureVector) -> Result<f64, BoostError> {
        self.check(x)?;
        Ok(self.score_slice(&x.values))
    }

    /// `+1` iff the margin is strictly above the decision threshold.
    pub fn predict(&self, x: &FeatureVector) -> Result<bool, BoostError> {
        self.check(x)?;
        Ok(self.predict_slice(&x.values))
    }

    /// Upper bound on training error: product of `2 sqrt(eps (1 - eps))`.
    pub fn training_error_bound(&self) -> f64 {
        self.training_errors
            .iter()
            .map(|e| 2.0 * (e * (1.0 - e)).sqrt())
            .product()
    }

    /// Largest possible absolute margin.
    pub fn max_abs_score(&self) -> f64 {
        self.stages.iter().map(|s| s.alpha.abs()).sum()
    }

    /// Total `|alpha|` per feature, largest first; ties by feature index.
    pub fn feature_importance(&self) -> Vec<(usize, f64)> {
        let mut mass = std::collections::BTreeMap::new();
        for s in &self.stages {
            *mass.entry(s.stump.feature_index).or_insert(0.0) += s.alpha.abs();
        }
        let mut ranked: Vec<(usize, f64)> = mass.into_iter().collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("classifier serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, BoostError> {
        serde_json::from_str(s).map_err(|e| BoostError::Serde(e.to_string()))
    }
}
