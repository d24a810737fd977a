use std::io::Cursor;

use reserve_core::featurization::*;
use reserve_core::simulator::{generate_synthetic_logs, SyntheticConfig};
use reserve_core::{BidPair, Money};

fn logs(n: usize, seed: u64) -> (Vec<RawRecord>, BuyerGroupMap) {
    let cfg = SyntheticConfig {
        n_records: n,
        seed,
        ..SyntheticConfig::default()
    };
    let logs = generate_synthetic_logs(&cfg).unwrap();
    (logs.records, logs.buyer_groups)
}

fn slot(schema: &FeatureSchema, name: &str) -> usize {
    schema
        .feature_names()
        .iter()
        .position(|n| n == name)
        .unwrap_or_else(|| panic!("no feature {name}"))
}

#[test]
fn age_thirty_sets_the_25_34_slot() {
    let (mut records, groups) = logs(200, 1);
    let schema = FeatureSchema::fit(&records, groups, FitOptions::default());
    records[0].age = 30;
    let x = schema.encode(&records[0]).unwrap();
    let on = slot(&schema, "age_bucket=25-34");
    assert_eq!(x.values[on], 1.0);
    for label in AgeBucket::ALL
        .iter()
        .map(|a| a.label())
        .filter(|l| *l != "25-34")
    {
        assert_eq!(x.values[slot(&schema, &format!("age_bucket={label}"))], 0.0);
    }
}

#[test]
fn age_bucket_edges() {
    assert_eq!(bucketize_age(17).label(), "0-17");
    assert_eq!(bucketize_age(18).label(), "18-20");
    assert_eq!(bucketize_age(20).label(), "18-20");
    assert_eq!(bucketize_age(90).label(), "65+");
}

#[test]
fn unseen_category_lands_in_unknown_slot() {
    let (mut records, groups) = logs(500, 2);
    let schema = FeatureSchema::fit(&records, groups, FitOptions::default());
    records[0].layout = "never-seen".into();
    let x = schema.encode(&records[0]).unwrap();
    assert_eq!(x.values[slot(&schema, "layout=<unknown>")], 1.0);
    let onehot_total: f64 = schema
        .feature_names()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.starts_with("layout="))
        .map(|(i, _)| x.values[i])
        .sum();
    assert_eq!(onehot_total, 1.0);
}

#[test]
fn unmapped_seat_is_notag() {
    let (mut records, groups) = logs(300, 3);
    let schema = FeatureSchema::fit(&records, groups.clone(), FitOptions::default());
    records[0].buyer_seat = "seat-999".into();
    assert_eq!(group_buyer_seat("seat-999", &groups), BuyerGroup::NoTag);
    let x = schema.encode(&records[0]).unwrap();
    assert_eq!(x.values[slot(&schema, "buyer_group=notag")], 1.0);
}

#[test]
fn encoding_is_deterministic_and_fixed_width() {
    let (records, groups) = logs(1_000, 4);
    let a = FeatureSchema::fit(&records, groups.clone(), FitOptions::default());
    let b = FeatureSchema::fit(&records, groups, FitOptions::default());
    assert_eq!(a, b);
    assert_eq!(a.feature_names().len(), a.dimension());
    let xs = a.encode_all(&records).unwrap();
    for (r, x) in records.iter().zip(&xs) {
        assert_eq!(x.values.len(), a.dimension());
        assert_eq!(x.schema_id, a.id);
        assert_eq!(x, &a.encode(r).unwrap());
        assert!(x.values.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn schema_round_trips_through_json() {
    let (records, groups) = logs(800, 5);
    let schema = FeatureSchema::fit(&records, groups, FitOptions::default());
    let text = serde_json::to_string(&schema).unwrap();
    let back: FeatureSchema = serde_json::from_str(&text).unwrap();
    back.verify_id().unwrap();
    assert_eq!(back, schema);
    assert_eq!(
        back.encode(&records[7]).unwrap(),
        schema.encode(&records[7]).unwrap()
    );
}

#[test]
fn tampered_schema_fails_verification() {
    let (records, groups) = logs(300, 6);
    let mut schema = FeatureSchema::fit(&records, groups, FitOptions::default());
    schema.blocks.pop();
    assert!(matches!(
        schema.verify_id(),
        Err(FeatureError::SchemaMismatch { .. })
    ));
}

#[test]
fn small_vocabularies_are_one_hot_large_ones_ordinal() {
    let (records, groups) = logs(2_000, 7);
    let schema = FeatureSchema::fit(&records, groups, FitOptions::default());
    let enc = |field: &str| {
        &schema
            .blocks
            .iter()
            .find(|b| b.field == field)
            .unwrap()
            .encoding
    };
    assert!(matches!(enc("ad_size"), FieldEncoding::OneHot { .. }));
    assert!(matches!(enc("site_tld"), FieldEncoding::Ordinal { .. }));
}

#[test]
fn label_bucket_example() {
    let schema = BucketSchema {
        price_edges: [0, 1, 5, 10, 41].into_iter().map(Money::whole).collect(),
        ..BucketSchema::default()
    };
    let labels = label_bids(
        &BidPair::new(Money::whole(7), Money::whole(3)).unwrap(),
        &schema,
    );
    assert_eq!(labels.top_bucket, 2);
    assert!(!labels.high_value);
    assert!(labels.separation);
}

#[test]
fn labels_follow_the_cutoffs() {
    let schema = BucketSchema::default();
    let l = label_bids(
        &BidPair::new(Money::whole(10), Money::whole(9)).unwrap(),
        &schema,
    );
    assert!(l.high_value);
    assert!(!l.separation);
    assert_eq!(l.top_bucket, 4);
    let l = label_bids(
        &BidPair::new(Money::whole(12), Money::whole(10)).unwrap(),
        &schema,
    );
    assert!(l.separation);
}

#[test]
fn outlier_filter_drops_planted_top() {
    let (mut records, _) = logs(1_000, 8);
    for r in records.iter_mut() {
        r.bids = BidPair::new(Money::whole(3), Money::whole(1)).unwrap();
    }
    records[500].bids = BidPair::new(Money::whole(50), Money::whole(20)).unwrap();
    let report = filter_outliers(records, Money::whole(41));
    assert_eq!(report.kept.len(), 999);
    assert_eq!(report.removed, 1);
}

#[test]
fn jsonl_round_trip_and_line_numbers() {
    let (records, _) = logs(50, 9);
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &records).unwrap();
    let back = read_jsonl(Cursor::new(&buf)).unwrap();
    assert_eq!(back, records);

    let mut text = String::from_utf8(buf).unwrap();
    text.push_str("{\"record_id\": 1}\n");
    match read_jsonl(Cursor::new(text.as_bytes())) {
        Err(FeatureError::Parse { line, .. }) => assert_eq!(line, 51),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn inverted_bids_are_rejected_on_read() {
    let (records, _) = logs(1, 10);
    let mut value = serde_json::to_value(&records[0]).unwrap();
    value["bids"] = serde_json::json!({"top": 1.0, "second": 2.0});
    let line = format!("{value}\n");
    assert!(matches!(
        read_jsonl(Cursor::new(line.as_bytes())),
        Err(FeatureError::Parse { line: 1, .. })
    ));
}
