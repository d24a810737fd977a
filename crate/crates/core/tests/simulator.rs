use reserve_core::cascade::CascadeParams;
use reserve_core::featurization::{BucketSchema, RawRecord};
use reserve_core::policy::{
    DecisionReason, OraclePolicy, OracleScope, PolicyError, ReserveDecision, ReservePolicy,
    TrainOptions,
};
use reserve_core::simulator::*;
use reserve_core::{effective_static_reserve, transaction_revenue, Money};

fn logs(n: usize, seed: u64) -> SyntheticLogs {
    let cfg = SyntheticConfig {
        n_records: n,
        seed,
        ..Default::default()
    };
    generate_synthetic_logs(&cfg).unwrap()
}

struct BlockAll;

impl ReservePolicy for BlockAll {
    fn decide(&self, record: &RawRecord) -> Result<ReserveDecision, PolicyError> {
        let static_reserve = effective_static_reserve(&record.reserves);
        Ok(ReserveDecision {
            changed: true,
            reserve: Money::MAX,
            reason: DecisionReason::Applied,
            ..ReserveDecision::unchanged(static_reserve, DecisionReason::Applied)
        })
    }
}

fn report(hv: i64, lv: i64, un: i64) -> RevenueReport {
    let mut r = RevenueReport::default();
    r.effected_high_value.revenue = Money::whole(hv as u32);
    r.effected_low_value.revenue = Money::whole(lv as u32);
    r.uneffected.revenue = Money::whole(un as u32);
    r.total_revenue = Money::whole((hv + lv + un) as u32);
    r
}

#[test]
fn generation_is_deterministic_and_calibrated() {
    let a = logs(100_000, 11);
    let b = logs(100_000, 11);
    assert_eq!(a.records, b.records);
    assert_eq!(a.buyer_groups, b.buyer_groups);
    let hv = a
        .records
        .iter()
        .filter(|r| r.bids.top() >= Money::whole(10))
        .count();
    let frac = hv as f64 / a.records.len() as f64;
    assert!((frac - 0.05).abs() <= 0.005, "high-value fraction {frac}");
    let cap = SyntheticConfig::default().outlier_cap;
    assert!(a
        .records
        .iter()
        .all(|r| r.bids.top() >= r.bids.second() && r.bids.top() <= cap));
    assert_ne!(
        logs(1_000, 12).records,
        logs(1_000, 11).records[..1_000].to_vec()
    );
}

#[test]
fn baseline_clears_at_max_of_second_and_static() {
    let l = logs(20_000, 3);
    let out = replay(&l.records, None, &ReplayOptions::default()).unwrap();
    let expected: i64 = l
        .records
        .iter()
        .map(|r| {
            let s = effective_static_reserve(&r.reserves);
            if s > r.bids.top() {
                0
            } else {
                r.bids.second().max(s).units()
            }
        })
        .sum();
    assert_eq!(out.baseline.total_revenue.units(), expected);
    assert_eq!(out.baseline, out.policy);
    assert_eq!(out.baseline.uneffected.auctions, 20_000);
}

#[test]
fn oracle_segment_earns_the_top_bids() {
    let l = logs(20_000, 4);
    let oracle = OraclePolicy {
        buckets: BucketSchema::default(),
        scope: OracleScope::SeparatedHighValue,
    };
    let out = replay(
        &l.records,
        Some(&oracle),
        &ReplayOptions {
            keep_decisions: true,
            ..Default::default()
        },
    )
    .unwrap();
    let effected: Vec<_> = out
        .decisions
        .iter()
        .filter(|(_, d)| d.changed)
        .map(|(id, _)| *id)
        .collect();
    let sum_top: i64 = l
        .records
        .iter()
        .filter(|r| effected.contains(&r.record_id))
        .map(|r| r.bids.top().units())
        .sum();
    assert!(!effected.is_empty());
    assert_eq!(out.policy.effected_low_value.auctions, 0);
    assert_eq!(out.policy.effected_high_value.revenue.units(), sum_top);
    assert_eq!(out.policy.effected_high_value.blocked, 0);
    assert!(out.policy.total_revenue > out.baseline.total_revenue);
}

#[test]
fn blocking_everything_earns_nothing() {
    let l = logs(5_000, 5);
    let out = replay(&l.records, Some(&BlockAll), &ReplayOptions::default()).unwrap();
    assert_eq!(out.policy.total_revenue, Money::ZERO);
    for seg in [
        Segment::EffectedHighValue,
        Segment::EffectedLowValue,
        Segment::Uneffected,
    ] {
        let s = out.policy.segment(seg);
        assert_eq!(s.blocked, s.auctions);
    }
    assert_eq!(out.policy.auctions(), 5_000);
    assert_eq!(out.lost_to_blocking, out.baseline.total_revenue);
}

#[test]
fn ledgers_balance() {
    let l = logs(10_000, 6);
    let oracle = OraclePolicy {
        buckets: BucketSchema::default(),
        scope: OracleScope::All,
    };
    let out = replay(
        &l.records,
        Some(&oracle),
        &ReplayOptions {
            shard_size: 777,
            ..Default::default()
        },
    )
    .unwrap();
    for r in [&out.baseline, &out.policy] {
        let segs = [
            Segment::EffectedHighValue,
            Segment::EffectedLowValue,
            Segment::Uneffected,
        ]
        .map(|s| *r.segment(s));
        assert_eq!(
            segs.iter().map(|s| s.revenue.units()).sum::<i64>(),
            r.total_revenue.units()
        );
        for s in segs {
            assert_eq!(s.sold + s.blocked, s.auctions);
        }
    }
    let per_record: i64 = l
        .records
        .iter()
        .map(|r| {
            transaction_revenue(oracle.decide(r).unwrap().reserve, r.bids)
                .revenue()
                .units()
        })
        .sum();
    assert_eq!(per_record, out.policy.total_revenue.units());
    assert_eq!(out.unchanged_mismatches, 0);
    let one_shard = replay(
        &l.records,
        Some(&oracle),
        &ReplayOptions {
            shard_size: 100_000,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(one_shard, out);
}

#[test]
fn sampling_keeps_a_seeded_fraction() {
    let l = logs(20_000, 8);
    let opts = ReplayOptions {
        sample_rate: 0.1,
        sample_seed: 42,
        ..Default::default()
    };
    let a = replay(&l.records, None, &opts).unwrap();
    let b = replay(&l.records, None, &opts).unwrap();
    assert_eq!(a, b);
    let n = a.baseline.auctions();
    assert!((1_800..=2_200).contains(&n), "{n}");
    let kept = l
        .records
        .iter()
        .filter(|r| sample_keep(r.record_id, 42, 0.1))
        .count() as u64;
    assert_eq!(kept, n);
    assert!(replay(
        &l.records,
        None,
        &ReplayOptions {
            sample_rate: 0.0,
            ..Default::default()
        }
    )
    .is_err());
}

#[test]
fn published_figures_give_three_and_a_half_percent() {
    let base = report(30_626, 85_753, 160_761);
    let new = report(40_316, 85_647, 160_761);
    let lift = compute_lift(&new, &base).unwrap();
    assert_eq!(lift.absolute_lift.units(), 9_584 * 10_000);
    assert_eq!(base.total_revenue, Money::whole(277_140));
    assert!((lift.relative_lift - 0.0346).abs() < 1e-4);
    assert!((lift.relative_lift * 100.0 - 3.5).abs() <= 0.05);
    assert_eq!(
        lift.segment_deltas.effected_low_value.units(),
        -106 * 10_000
    );
    assert_eq!(compute_lift(&base, &base).unwrap().relative_lift, 0.0);
    assert_eq!(
        compute_lift(&report(0, 0, 554_280), &base)
            .unwrap()
            .relative_lift,
        1.0
    );
    assert!(matches!(
        compute_lift(&base, &RevenueReport::default()),
        Err(SimError::ZeroBaseline)
    ));
}

fn small_split() -> (DataSplit, reserve_core::featurization::BuyerGroupMap) {
    let cfg = SyntheticConfig {
        n_records: 20_000,
        seed: 21,
        feature_signal_strength: 0.9,
        ..Default::default()
    };
    let l = generate_synthetic_logs(&cfg).unwrap();
    (
        split_records(&l.records, 21, SplitFractions::default()).unwrap(),
        l.buyer_groups,
    )
}

fn options() -> TrainOptions {
    TrainOptions::new(
        BucketSchema::default(),
        CascadeParams {
            max_stage_fpr: 0.52,
            min_stage_tpr: 0.95,
            target_fpr: 0.05,
        },
    )
}

#[test]
fn split_is_a_partition() {
    let (split, _) = small_split();
    let mut ids: Vec<u64> = split
        .train
        .iter()
        .chain(&split.validation)
        .chain(&split.holdout)
        .map(|r| r.record_id)
        .collect();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(ids.len(), 20_000);
    let frac = split.train.len() as f64 / 20_000.0;
    assert!((frac - 0.5).abs() < 0.02);
}

#[test]
fn single_point_grid_returns_that_point() {
    let (split, groups) = small_split();
    let grid = GridSpec {
        high_value_cutoffs: vec![Money::whole(10)],
        gap_cutoffs: vec![Money::whole(2)],
    };
    let search = grid_search_cutoffs(
        &split,
        &groups,
        &options(),
        &ReplayOptions::default(),
        &grid,
    )
    .unwrap();
    assert_eq!(search.points.len(), 1);
    assert_eq!(search.best, Some(0));
    let direct = evaluate_grid_point(
        &split,
        &groups,
        &options(),
        &ReplayOptions::default(),
        Money::whole(10),
        Money::whole(2),
    )
    .unwrap();
    assert_eq!(search.points[0], direct);
}

#[test]
fn cutoff_above_cap_is_skipped() {
    let (split, groups) = small_split();
    let grid = GridSpec {
        high_value_cutoffs: vec![Money::whole(10), Money::whole(45)],
        gap_cutoffs: vec![Money::whole(2)],
    };
    let search = grid_search_cutoffs(
        &split,
        &groups,
        &options(),
        &ReplayOptions::default(),
        &grid,
    )
    .unwrap();
    let skipped = &search.points[1];
    assert!(skipped.skipped.is_some() && skipped.lift.is_none());
    assert_eq!(search.best, Some(0));
    let mut csv = Vec::new();
    write_grid_csv(&mut csv, &search).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 3);
    let empty = GridSpec {
        high_value_cutoffs: vec![],
        gap_cutoffs: vec![Money::whole(2)],
    };
    assert!(matches!(
        grid_search_cutoffs(
            &split,
            &groups,
            &options(),
            &ReplayOptions::default(),
            &empty
        ),
        Err(SimError::EmptyGrid)
    ));
}

#[test]
fn revenue_csv_lists_segments() {
    let l = logs(2_000, 9);
    let out = replay(&l.records, None, &ReplayOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_revenue_csv(&mut buf, &out).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().next().unwrap().contains("segment"));
    assert!(text.contains("uneffected"));
}
