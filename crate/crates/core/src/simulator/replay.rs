use std::io::Write;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::auction::{effective_static_reserve, transaction_revenue};
use crate::featurization::RawRecord;
use crate::money::Money;
use crate::policy::{PolicyError, ReserveDecision, ReservePolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    /// Policy changed the reserve and the true top bid is high-value.
    EffectedHighValue,
    EffectedLowValue,
    Uneffected,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentLedger {
    pub revenue: Money,
    pub auctions: u64,
    pub sold: u64,
    pub blocked: u64,
}

impl SegmentLedger {
    fn merge(&mut self, other: &SegmentLedger) {
        self.revenue += other.revenue;
        self.auctions += other.auctions;
        self.sold += other.sold;
        self.blocked += other.blocked;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevenueReport {
    pub total_revenue: Money,
    pub effected_high_value: SegmentLedger,
    pub effected_low_value: SegmentLedger,
    pub uneffected: SegmentLedger,
}

impl RevenueReport {
    pub fn segment(&self, segment: Segment) -> &SegmentLedger {
        match segment {
            Segment::EffectedHighValue => &self.effected_high_value,
            Segment::EffectedLowValue => &self.effected_low_value,
            Segment::Uneffected => &self.uneffected,
        }
    }

    fn segment_mut(&mut self, segment: Segment) -> &mut SegmentLedger {
        match segment {
            Segment::EffectedHighValue => &mut self.effected_high_value,
            Segment::EffectedLowValue => &mut self.effected_low_value,
            Segment::Uneffected => &mut self.uneffected,
        }
    }

    fn record(&mut self, segment: Segment, sold: Option<Money>) {
        let ledger = self.segment_mut(segment);
        ledger.auctions += 1;
        match sold {
            Some(price) => {
                ledger.sold += 1;
                ledger.revenue += price;
                self.total_revenue += price;
            }
            None => ledger.blocked += 1,
        }
    }

    fn merge(&mut self, other: &RevenueReport) {
        self.total_revenue += other.total_revenue;
        self.effected_high_value.merge(&other.effected_high_value);
        self.effected_low_value.merge(&other.effected_low_value);
        self.uneffected.merge(&other.uneffected);
    }

    pub fn auctions(&self) -> u64 {
        self.effected_high_value.auctions
            + self.effected_low_value.auctions
            + self.uneffected.auctions
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayOptions {
    /// True top bids at or above this count as high-value when segmenting.
    pub high_value_cutoff: Money,
    /// Fraction of auctions replayed, chosen by a seeded hash of the record id.
    pub sample_rate: f64,
    pub sample_seed: u64,
    pub keep_decisions: bool,
    pub shard_size: usize,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        ReplayOptions {
            high_value_cutoff: Money::whole(10),
            sample_rate: 1.0,
            sample_seed: 0,
            keep_decisions: false,
            shard_size: 4096,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub baseline: RevenueReport,
    pub policy: RevenueReport,
    /// Baseline revenue of effected auctions the policy blocked.
    pub lost_to_blocking: Money,
    /// Unchanged auctions whose outcome differed from baseline; always zero.
    pub unchanged_mismatches: u64,
    #[serde(skip)]
    pub decisions: Vec<(u64, ReserveDecision)>,
}

impl ReplayOutcome {
    fn merge(mut self, other: ReplayOutcome) -> ReplayOutcome {
        self.baseline.merge(&other.baseline);
        self.policy.merge(&other.policy);
        self.lost_to_blocking += other.lost_to_blocking;
        self.unchanged_mismatches += other.unchanged_mismatches;
        self.decisions.extend(other.decisions);
        self
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash-based uniform in [0, 1) for a record id.
pub(crate) fn unit_hash(seed: u64, record_id: u64) -> f64 {
    (splitmix64(splitmix64(seed) ^ record_id) >> 11) as f64 / (1u64 << 53) as f64
}

pub fn sample_keep(record_id: u64, seed: u64, rate: f64) -> bool {
    rate >= 1.0 || unit_hash(seed, record_id) < rate
}

fn replay_shard(
    records: &[RawRecord],
    policy: Option<&dyn ReservePolicy>,
    options: &ReplayOptions,
) -> Result<ReplayOutcome, PolicyError> {
    let mut out = ReplayOutcome::default();
    for record in records {
        if !sample_keep(record.record_id, options.sample_seed, options.sample_rate) {
            continue;
        }
        let static_reserve = effective_static_reserve(&record.reserves);
        let decision = match policy {
            Some(p) => p.decide(record)?,
            None => ReserveDecision::unchanged(
                static_reserve,
                crate::policy::DecisionReason::NotSeparated,
            ),
        };
        let base = transaction_revenue(static_reserve, record.bids);
        let new = transaction_revenue(decision.reserve, record.bids);
        let segment = if !decision.changed {
            if base != new {
                out.unchanged_mismatches += 1;
            }
            Segment::Uneffected
        } else if record.bids.top() >= options.high_value_cutoff {
            Segment::EffectedHighValue
        } else {
            Segment::EffectedLowValue
        };
        if decision.changed && new.blocked {
            out.lost_to_blocking += base.revenue();
        }
        out.baseline
            .record(segment, base.sold.then_some(base.clearing_price));
        out.policy
            .record(segment, new.sold.then_some(new.clearing_price));
        if options.keep_decisions {
            out.decisions.push((record.record_id, decision));
        }
    }
    Ok(out)
}

/// Replays logged auctions under the static reserves and under `policy`.
/// With no policy both ledgers are the static baseline. Shards run in
/// parallel; all sums are integer so the result does not depend on the
/// thread count.
pub fn replay(
    records: &[RawRecord],
    policy: Option<&dyn ReservePolicy>,
    options: &ReplayOptions,
) -> Result<ReplayOutcome, SimError> {
    if !(options.sample_rate > 0.0 && options.sample_rate <= 1.0) {
        return Err(SimError::Config(format!(
            "sample rate {} not in (0, 1]",
            options.sample_rate
        )));
    }
    if options.shard_size == 0 {
        return Err(SimError::Config("shard size must be positive".into()));
    }
    let shards: Vec<Range<usize>> = (0..records.len())
        .step_by(options.shard_size)
        .map(|s| s..(s + options.shard_size).min(records.len()))
        .collect();
    let parts = shards
        .into_par_iter()
        .map(|r| replay_shard(&records[r], policy, options))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(parts
        .into_iter()
        .fold(ReplayOutcome::default(), ReplayOutcome::merge))
}

pub fn write_revenue_csv<W: Write>(writer: W, outcome: &ReplayOutcome) -> Result<(), SimError> {
    let io = |e: csv::Error| SimError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["run", "segment", "revenue", "auctions", "sold", "blocked"])
        .map_err(io)?;
    for (run, report) in [("baseline", &outcome.baseline), ("policy", &outcome.policy)] {
        for (name, seg) in [
            ("effected_high_value", Segment::EffectedHighValue),
            ("effected_low_value", Segment::EffectedLowValue),
            ("uneffected", Segment::Uneffected),
        ] {
            let l = report.segment(seg);
            w.write_record([
                run.to_string(),
                name.to_string(),
                l.revenue.to_string(),
                l.auctions.to_string(),
                l.sold.to_string(),
                l.blocked.to_string(),
            ])
            .map_err(io)?;
        }
        w.write_record([
            run,
            "total",
            &report.total_revenue.to_string(),
            &report.auctions().to_string(),
            "",
            "",
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| SimError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_rate_is_roughly_respected() {
        let kept = (0..100_000u64)
            .filter(|id| sample_keep(*id, 3, 0.25))
            .count();
        assert!((kept as f64 / 100_000.0 - 0.25).abs() < 0.01, "{kept}");
        assert!((0..1000u64).all(|id| sample_keep(id, 3, 1.0)));
    }

    #[test]
    fn unit_hash_in_range() {
        for id in 0..10_000u64 {
            let u = unit_hash(9, id);
            assert!((0.0..1.0).contains(&u));
        }
    }
}
