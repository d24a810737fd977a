use serde::{Deserialize, Serialize};

use super::record::RawRecord;
use super::FeatureError;
use crate::auction::BidPair;
use crate::money::Money;

/// Price discretization and the two label cutoffs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketSchema {
    /// Ascending edges; bucket `i` is `[price_edges[i], price_edges[i + 1])`.
    pub price_edges: Vec<Money>,
    pub high_value_cutoff: Money,
    pub gap_cutoff: Money,
    pub outlier_cap: Money,
}

impl Default for BucketSchema {
    fn default() -> Self {
        BucketSchema {
            price_edges: [0, 1, 2, 5, 10, 15, 20, 41]
                .into_iter()
                .map(Money::whole)
                .collect(),
            high_value_cutoff: Money::whole(10),
            gap_cutoff: Money::whole(2),
            outlier_cap: Money::whole(41),
        }
    }
}

impl BucketSchema {
    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.price_edges.len() < 2 {
            return Err(FeatureError::InvalidBuckets(
                "need at least two price edges".into(),
            ));
        }
        if self.price_edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FeatureError::InvalidBuckets(
                "price edges must be strictly ascending".into(),
            ));
        }
        if self.high_value_bucket_start().is_none() {
            return Err(FeatureError::InvalidBuckets(format!(
                "high-value cutoff {} is not one of the inner price edges",
                self.high_value_cutoff
            )));
        }
        if self.outlier_cap == Money::ZERO {
            return Err(FeatureError::InvalidBuckets(
                "outlier cap must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Copy with `cutoff` used as the high-value cutoff, inserting it as an
    /// edge when it is not one already.
    pub fn with_high_value_cutoff(&self, cutoff: Money) -> BucketSchema {
        let mut schema = self.clone();
        if !schema.price_edges.contains(&cutoff) {
            schema.price_edges.push(cutoff);
            schema.price_edges.sort();
        }
        schema.high_value_cutoff = cutoff;
        schema
    }

    pub fn bucket_count(&self) -> usize {
        self.price_edges.len() - 1
    }

    /// Index of the half-open bucket holding `price`. Prices at or above the
    /// last edge land in the last bucket, prices below the first in bucket 0.
    pub fn bucket_of(&self, price: Money) -> usize {
        let above = self.price_edges.partition_point(|e| *e <= price);
        above.saturating_sub(1).min(self.bucket_count() - 1)
    }

    /// First bucket whose lower edge is the high-value cutoff.
    pub fn high_value_bucket_start(&self) -> Option<usize> {
        self.price_edges[..self.price_edges.len() - 1]
            .iter()
            .position(|e| *e == self.high_value_cutoff)
    }

    pub fn high_value_buckets(&self) -> std::ops::Range<usize> {
        let start = self
            .high_value_bucket_start()
            .unwrap_or(self.bucket_count());
        start..self.bucket_count()
    }

    pub fn bucket_floor(&self, bucket: usize) -> Result<Money, FeatureError> {
        if bucket >= self.bucket_count() {
            return Err(FeatureError::InvalidBucket(bucket));
        }
        Ok(self.price_edges[bucket])
    }

    pub fn bucket_ceiling(&self, bucket: usize) -> Result<Money, FeatureError> {
        if bucket >= self.bucket_count() {
            return Err(FeatureError::InvalidBucket(bucket));
        }
        Ok(self.price_edges[bucket + 1])
    }

    pub fn is_high_value(&self, bids: &BidPair) -> bool {
        bids.top() >= self.high_value_cutoff
    }

    pub fn is_separated(&self, bids: &BidPair) -> bool {
        bids.gap() >= self.gap_cutoff
    }
}

/// Labels for both classifier families; `true` is the +1 class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    pub high_value: bool,
    pub separation: bool,
    pub top_bucket: usize,
}

pub fn label_bids(bids: &BidPair, schema: &BucketSchema) -> LabelSet {
    LabelSet {
        high_value: schema.is_high_value(bids),
        separation: schema.is_separated(bids),
        top_bucket: schema.bucket_of(bids.top()),
    }
}

pub fn label_records(records: &[RawRecord], schema: &BucketSchema) -> Vec<LabelSet> {
    records
        .iter()
        .map(|r| label_bids(&r.bids, schema))
        .collect()
}
