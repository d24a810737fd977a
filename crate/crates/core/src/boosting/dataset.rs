use rayon::prelude::*;

use super::BoostError;
use crate::featurization::FeatureVector;

/// Column-major training matrix with every feature pre-sorted once, so each
/// boosting round scans features in O(n).
#[derive(Clone, Debug)]
pub struct TrainingSet {
    columns: Vec<Vec<f64>>,
    labels: Vec<bool>,
    sorted: Vec<Vec<u32>>,
}

impl TrainingSet {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], labels: &[bool]) -> Result<Self, BoostError> {
        if rows.len() != labels.len() {
            return Err(BoostError::LengthMismatch {
                rows: rows.len(),
                labels: labels.len(),
            });
        }
        if rows.is_empty() {
            return Err(BoostError::Empty);
        }
        let dim = rows[0].as_ref().len();
        if dim == 0 {
            return Err(BoostError::Empty);
        }
        let mut columns = vec![Vec::with_capacity(rows.len()); dim];
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(BoostError::Dimension {
                    expected: dim,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| v.is_nan()) {
                return Err(BoostError::NotANumber);
            }
            for (col, v) in columns.iter_mut().zip(row) {
                col.push(*v);
            }
        }
        let sorted = columns
            .par_iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..col.len() as u32).collect();
                idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
                idx
            })
            .collect();
        Ok(TrainingSet {
            columns,
            labels: labels.to_vec(),
            sorted,
        })
    }

    pub fn from_vectors(vectors: &[&FeatureVector], labels: &[bool]) -> Result<Self, BoostError> {
        let rows: Vec<&[f64]> = vectors.iter().map(|v| v.values.as_slice()).collect();
        Self::from_rows(&rows, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.columns.len()
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn column(&self, feature: usize) -> &[f64] {
        &self.columns[feature]
    }

    pub(crate) fn sorted_indices(&self, feature: usize) -> &[u32] {
        &self.sorted[feature]
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.columns[feature][row]
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|l| **l).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let pos = self.positives();
        pos > 0 && pos < self.len()
    }
}
