use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::auction::{BidPair, StaticReserves};
use crate::money::Money;

/// One auction as it appears in the log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub record_id: u64,

    pub ad_section: String,
    pub site_tld: String,
    pub layout: String,
    pub ad_size: String,
    pub ssp_host: String,
    pub ad_position: String,

    pub age: u32,
    pub gender: String,
    pub device_type: String,
    pub geo: String,
    /// Opaque, ordinal-encoded.
    #[serde(default)]
    pub app_info: String,
    pub browser: String,
    pub colo: String,
    pub page_views: u32,
    pub prev_clearing_prices: Vec<Money>,
    pub visit_count: u32,
    pub impressions: u32,
    pub clicks: u32,
    /// Prices of the user's previously won impressions.
    pub prev_win_stats: Vec<Money>,
    /// Opaque, ordinal-encoded.
    #[serde(default)]
    pub search_query: String,

    pub buyer_seat: String,
    pub winning_demand_seat: String,

    pub date: String,
    pub hour: u8,
    pub dow: u8,

    pub bids: BidPair,
    pub reserves: StaticReserves,
}

impl RawRecord {
    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.hour > 23 {
            return Err(FeatureError::InvalidRecord {
                record_id: self.record_id,
                reason: format!("hour {} outside 0..=23", self.hour),
            });
        }
        if self.dow > 6 {
            return Err(FeatureError::InvalidRecord {
                record_id: self.record_id,
                reason: format!("dow {} outside 0..=6", self.dow),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterReport {
    pub kept: Vec<RawRecord>,
    pub removed: usize,
}

/// Drops records whose top bid is above `cap`.
pub fn filter_outliers(records: Vec<RawRecord>, cap: Money) -> FilterReport {
    let before = records.len();
    let kept: Vec<RawRecord> = records
        .into_iter()
        .filter(|r| r.bids.top() <= cap)
        .collect();
    FilterReport {
        removed: before - kept.len(),
        kept,
    }
}

/// Reads a JSONL auction log. Blank lines are skipped.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<RawRecord>, FeatureError> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| FeatureError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord = serde_json::from_str(&line).map_err(|e| FeatureError::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        record.validate()?;
        records.push(record);
    }
    Ok(records)
}

pub fn write_jsonl<W: Write>(mut writer: W, records: &[RawRecord]) -> Result<(), FeatureError> {
    for record in records {
        serde_json::to_writer(&mut writer, record).map_err(|e| FeatureError::Io(e.to_string()))?;
        writer
            .write_all(b"\n")
            .map_err(|e| FeatureError::Io(e.to_string()))?;
    }
    Ok(())
}
