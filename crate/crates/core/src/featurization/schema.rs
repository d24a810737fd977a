//! Fitted encoding schema: categorical fields become one-hot blocks or ordinal
//! indices, numeric fields pass through, and per-user price histories expand to
//! max/mean/count.

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::groups::{bucketize_age, group_buyer_seat, AgeBucket, BuyerGroup, BuyerGroupMap};
use super::record::RawRecord;
use super::FeatureError;
use crate::auction::effective_static_reserve;
use crate::money::Money;

/// Name reserved for categories not seen while fitting.
pub const UNKNOWN_CATEGORY: &str = "<unknown>";

/// Categorical fields whose vocabulary is learned from the training corpus.
pub const FITTED_CATEGORICAL_FIELDS: &[&str] = &[
    "ad_section",
    "site_tld",
    "layout",
    "ad_size",
    "ssp_host",
    "ad_position",
    "gender",
    "device_type",
    "geo",
    "app_info",
    "browser",
    "colo",
    "search_query",
    "winning_demand_seat",
    "date",
];

pub const NUMERIC_FIELDS: &[&str] = &[
    "hour",
    "page_views",
    "visit_count",
    "impressions",
    "clicks",
    "prev_clearing_prices.max",
    "prev_clearing_prices.mean",
    "prev_clearing_prices.count",
    "prev_win_stats.max",
    "prev_win_stats.mean",
    "prev_win_stats.count",
    "static_reserve",
];

/// Short content hash identifying a fitted schema.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct SchemaId(pub u64);

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl Serialize for SchemaId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SchemaId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        u64::from_str_radix(&s, 16)
            .map(SchemaId)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub schema_id: SchemaId,
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldEncoding {
    Numeric,
    /// Slot 0 is the unknown category, slot `k + 1` is `categories[k]`.
    OneHot {
        categories: Vec<String>,
    },
    /// Single column holding 0 for unknown, `k + 1` for `categories[k]`.
    Ordinal {
        categories: Vec<String>,
    },
}

impl FieldEncoding {
    fn width(&self) -> usize {
        match self {
            FieldEncoding::Numeric | FieldEncoding::Ordinal { .. } => 1,
            FieldEncoding::OneHot { categories } => categories.len() + 1,
        }
    }

    fn category_index(categories: &[String], value: &str) -> usize {
        categories
            .binary_search_by(|c| c.as_str().cmp(value))
            .map(|i| i + 1)
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureBlock {
    pub field: String,
    pub encoding: FieldEncoding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Fitted categoricals with at most this many categories are one-hot
    /// encoded; larger vocabularies get an ordinal column.
    pub one_hot_max: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { one_hot_max: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub id: SchemaId,
    pub buyer_groups: BuyerGroupMap,
    pub blocks: Vec<FeatureBlock>,
}

impl FeatureSchema {
    /// Single pass over the training corpus assigning category vocabularies.
    pub fn fit(records: &[RawRecord], buyer_groups: BuyerGroupMap, options: FitOptions) -> Self {
        let mut vocab: Vec<BTreeSet<String>> =
            vec![BTreeSet::new(); FITTED_CATEGORICAL_FIELDS.len()];
        for record in records {
            for (set, field) in vocab.iter_mut().zip(FITTED_CATEGORICAL_FIELDS) {
                let value = categorical_value(record, field, &buyer_groups)
                    .expect("fitted fields are known");
                if !set.contains(value.as_ref()) {
                    set.insert(value.into_owned());
                }
            }
        }

        let mut blocks = Vec::new();
        blocks.push(FeatureBlock {
            field: "age_bucket".into(),
            encoding: FieldEncoding::OneHot {
                categories: sorted(AgeBucket::ALL.iter().map(|b| b.label().to_string())),
            },
        });
        blocks.push(FeatureBlock {
            field: "buyer_group".into(),
            encoding: FieldEncoding::OneHot {
                categories: sorted(BuyerGroup::ALL.iter().map(|g| g.label().to_string())),
            },
        });
        blocks.push(FeatureBlock {
            field: "dow".into(),
            encoding: FieldEncoding::OneHot {
                categories: (0..7).map(|d| d.to_string()).collect(),
            },
        });
        for (set, field) in vocab.into_iter().zip(FITTED_CATEGORICAL_FIELDS) {
            let categories: Vec<String> = set.into_iter().collect();
            let encoding = if categories.len() <= options.one_hot_max {
                FieldEncoding::OneHot { categories }
            } else {
                FieldEncoding::Ordinal { categories }
            };
            blocks.push(FeatureBlock {
                field: (*field).into(),
                encoding,
            });
        }
        for field in NUMERIC_FIELDS {
            blocks.push(FeatureBlock {
                field: (*field).into(),
                encoding: FieldEncoding::Numeric,
            });
        }
        Self::from_parts(buyer_groups, blocks)
    }

    /// Builds a schema from explicit blocks, computing its content id.
    pub fn from_parts(buyer_groups: BuyerGroupMap, blocks: Vec<FeatureBlock>) -> Self {
        let mut schema = FeatureSchema {
            id: SchemaId(0),
            buyer_groups,
            blocks,
        };
        schema.id = schema.content_id();
        schema
    }

    fn content_id(&self) -> SchemaId {
        let body =
            serde_json::to_vec(&(&self.buyer_groups, &self.blocks)).expect("schema serializes");
        let digest = Sha256::digest(&body);
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        SchemaId(u64::from_be_bytes(bytes))
    }

    /// Confirms the stored id matches the content (after loading from disk).
    pub fn verify_id(&self) -> Result<(), FeatureError> {
        let actual = self.content_id();
        if actual != self.id {
            return Err(FeatureError::SchemaMismatch {
                expected: self.id,
                found: actual,
            });
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.encoding.width()).sum()
    }

    /// Human-readable name of every output column.
    pub fn feature_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.dimension());
        for block in &self.blocks {
            match &block.encoding {
                FieldEncoding::Numeric => names.push(block.field.clone()),
                FieldEncoding::Ordinal { .. } => names.push(format!("{}#ordinal", block.field)),
                FieldEncoding::OneHot { categories } => {
                    names.push(format!("{}={}", block.field, UNKNOWN_CATEGORY));
                    names.extend(categories.iter().map(|c| format!("{}={}", block.field, c)));
                }
            }
        }
        names
    }

    pub fn encode_into(&self, record: &RawRecord, out: &mut [f64]) -> Result<(), FeatureError> {
        if out.len() != self.dimension() {
            return Err(FeatureError::Dimension {
                expected: self.dimension(),
                found: out.len(),
            });
        }
        let mut offset = 0;
        for block in &self.blocks {
            match &block.encoding {
                FieldEncoding::Numeric => {
                    out[offset] = numeric_value(record, &block.field)?;
                }
                FieldEncoding::OneHot { categories } => {
                    let value = categorical_value(record, &block.field, &self.buyer_groups)?;
                    let slot = FieldEncoding::category_index(categories, &value);
                    out[offset..offset + categories.len() + 1].fill(0.0);
                    out[offset + slot] = 1.0;
                }
                FieldEncoding::Ordinal { categories } => {
                    let value = categorical_value(record, &block.field, &self.buyer_groups)?;
                    out[offset] = FieldEncoding::category_index(categories, &value) as f64;
                }
            }
            offset += block.encoding.width();
        }
        Ok(())
    }

    pub fn encode(&self, record: &RawRecord) -> Result<FeatureVector, FeatureError> {
        let mut values = vec![0.0; self.dimension()];
        self.encode_into(record, &mut values)?;
        Ok(FeatureVector {
            values,
            schema_id: self.id,
        })
    }

    /// Encodes records in parallel; output order matches input order.
    pub fn encode_all(&self, records: &[RawRecord]) -> Result<Vec<FeatureVector>, FeatureError> {
        records.par_iter().map(|r| self.encode(r)).collect()
    }
}

fn sorted(items: impl Iterator<Item = String>) -> Vec<String> {
    let mut v: Vec<String> = items.collect();
    v.sort();
    v
}

fn categorical_value<'a>(
    record: &'a RawRecord,
    field: &str,
    groups: &BuyerGroupMap,
) -> Result<Cow<'a, str>, FeatureError> {
    let value = match field {
        "ad_section" => Cow::Borrowed(record.ad_section.as_str()),
        "site_tld" => Cow::Borrowed(record.site_tld.as_str()),
        "layout" => Cow::Borrowed(record.layout.as_str()),
        "ad_size" => Cow::Borrowed(record.ad_size.as_str()),
        "ssp_host" => Cow::Borrowed(record.ssp_host.as_str()),
        "ad_position" => Cow::Borrowed(record.ad_position.as_str()),
        "gender" => Cow::Borrowed(record.gender.as_str()),
        "device_type" => Cow::Borrowed(record.device_type.as_str()),
        "geo" => Cow::Borrowed(record.geo.as_str()),
        "app_info" => Cow::Borrowed(record.app_info.as_str()),
        "browser" => Cow::Borrowed(record.browser.as_str()),
        "colo" => Cow::Borrowed(record.colo.as_str()),
        "search_query" => Cow::Borrowed(record.search_query.as_str()),
        "winning_demand_seat" => Cow::Borrowed(record.winning_demand_seat.as_str()),
        "date" => Cow::Borrowed(record.date.as_str()),
        "age_bucket" => Cow::Borrowed(bucketize_age(record.age).label()),
        "buyer_group" => Cow::Borrowed(group_buyer_seat(&record.buyer_seat, groups).label()),
        "dow" => Cow::Owned(record.dow.to_string()),
        other => return Err(FeatureError::UnknownField(other.to_string())),
    };
    Ok(value)
}

fn price_stats(prices: &[Money]) -> (f64, f64, f64) {
    if prices.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let max = prices
        .iter()
        .max()
        .copied()
        .unwrap_or_default()
        .as_dollars();
    let total: Money = prices.iter().sum();
    let mean = total.as_dollars() / prices.len() as f64;
    (max, mean, prices.len() as f64)
}

fn numeric_value(record: &RawRecord, field: &str) -> Result<f64, FeatureError> {
    let value = match field {
        "hour" => record.hour as f64,
        "page_views" => record.page_views as f64,
        "visit_count" => record.visit_count as f64,
        "impressions" => record.impressions as f64,
        "clicks" => record.clicks as f64,
        "prev_clearing_prices.max" => price_stats(&record.prev_clearing_prices).0,
        "prev_clearing_prices.mean" => price_stats(&record.prev_clearing_prices).1,
        "prev_clearing_prices.count" => price_stats(&record.prev_clearing_prices).2,
        "prev_win_stats.max" => price_stats(&record.prev_win_stats).0,
        "prev_win_stats.mean" => price_stats(&record.prev_win_stats).1,
        "prev_win_stats.count" => price_stats(&record.prev_win_stats).2,
        "static_reserve" => effective_static_reserve(&record.reserves).as_dollars(),
        other => return Err(FeatureError::UnknownField(other.to_string())),
    };
    Ok(value)
}
