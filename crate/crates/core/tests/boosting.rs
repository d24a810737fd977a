use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reserve_core::boosting::*;
use reserve_core::featurization::{label_records, BucketSchema, FeatureSchema, FitOptions};
use reserve_core::simulator::{
    generate_synthetic_logs, split_records, SplitFractions, SyntheticConfig,
};

fn random_set(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<bool>) {
    let n = rng.random_range(4..=500);
    let d = rng.random_range(1..=6);
    loop {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| (rng.random_range(0..20) as f64) * 0.5)
                    .collect()
            })
            .collect();
        let labels: Vec<bool> = rows
            .iter()
            .map(|r| r[0] + rng.random_range(-3.0..3.0) > 5.0)
            .collect();
        if labels.iter().any(|l| *l) && labels.iter().any(|l| !*l) {
            return (rows, labels);
        }
    }
}

#[test]
fn round_invariants_on_random_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let (rows, labels) = random_set(&mut rng);
        let set = TrainingSet::from_rows(&rows, &labels).unwrap();
        let mut booster = Booster::new(&set, None).unwrap();
        let mut bound = 1.0;
        for _ in 0..15 {
            let round = booster.step();
            assert!((booster.weights().iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!((round.weight_sum_after - 1.0).abs() < 1e-9);
            if !round.was_clamped() {
                assert!((round.misclassified_weight_after - 0.5).abs() < 1e-9);
            }
            bound *= 2.0 * (round.epsilon * (1.0 - round.epsilon)).sqrt();
            assert!(booster.training_error() <= bound + 1e-12);
        }
        let clf = booster.classifier();
        assert!((clf.training_error_bound() - bound).abs() < 1e-12);
    }
}

#[test]
fn chosen_stump_is_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let (rows, labels) = random_set(&mut rng);
        let set = TrainingSet::from_rows(&rows, &labels).unwrap();
        let w: Vec<f64> = (0..rows.len())
            .map(|_| rng.random_range(0.1..1.0))
            .collect();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|v| v / total).collect();
        let fit = train_stump(&set, &w, None);
        for f in 0..set.dimension() {
            for row in &rows {
                for polarity in [Polarity::Positive, Polarity::Negative] {
                    let s = Stump {
                        feature_index: f,
                        threshold: row[f],
                        polarity,
                    };
                    assert!(fit.error <= weighted_error(&set, &w, &s) + 1e-12);
                }
            }
        }
    }
}

fn pairwise_auc(scores: &[f64], labels: &[bool]) -> Ratio<u64> {
    let (mut num, mut pairs) = (0u64, 0u64);
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                pairs += 1;
                num += match scores[i].partial_cmp(&scores[j]).unwrap() {
                    std::cmp::Ordering::Greater => 2,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Less => 0,
                };
            }
        }
    }
    Ratio::new(num, 2 * pairs)
}

#[test]
fn auc_matches_pairwise_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let n = rng.random_range(2..=200);
        let scores: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0..25) as f64 / 4.0)
            .collect();
        let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
        labels[0] = true;
        labels[1] = false;
        let oracle = pairwise_auc(&scores, &labels);
        let got = roc_auc(&scores, &labels).unwrap();
        assert_eq!(got, *oracle.numer() as f64 / *oracle.denom() as f64);
    }
}

#[test]
fn classifier_json_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (rows, labels) = random_set(&mut rng);
    let set = TrainingSet::from_rows(&rows, &labels).unwrap();
    let clf = adaboost_train(&set, 12, None).unwrap();
    let back = StrongClassifier::from_json(&clf.to_json()).unwrap();
    assert_eq!(back, clf);
    for r in &rows {
        assert_eq!(back.score_slice(r).to_bits(), clf.score_slice(r).to_bits());
    }
}

#[test]
fn single_class_and_empty_inputs_error() {
    let rows = vec![vec![1.0], vec![2.0]];
    let set = TrainingSet::from_rows(&rows, &[true, true]).unwrap();
    assert!(matches!(
        Booster::new(&set, None),
        Err(BoostError::SingleClass { .. })
    ));
    assert!(matches!(
        adaboost_train(&set, 0, None),
        Err(BoostError::NoRounds | BoostError::SingleClass { .. })
    ));
    assert!(compute_alpha(0.0).is_err());
    assert!(compute_alpha(1.0).is_err());
}

#[test]
fn no_signal_gives_chance_auc() {
    let cfg = SyntheticConfig {
        n_records: 40_000,
        seed: 21,
        feature_signal_strength: 0.0,
        ..Default::default()
    };
    let logs = generate_synthetic_logs(&cfg).unwrap();
    let split = split_records(&logs.records, 21, SplitFractions::default()).unwrap();
    let schema = FeatureSchema::fit(&split.train, logs.buyer_groups, FitOptions::default());
    let buckets = BucketSchema::default();
    let encode = |rs| -> Vec<Vec<f64>> {
        schema
            .encode_all(rs)
            .unwrap()
            .into_iter()
            .map(|v| v.values)
            .collect()
    };
    let (tx, hx) = (encode(&split.train), encode(&split.holdout));
    let (tl, hl) = (
        label_records(&split.train, &buckets),
        label_records(&split.holdout, &buckets),
    );
    type Pick = fn(&reserve_core::featurization::LabelSet) -> bool;
    let picks: [Pick; 2] = [|l| l.high_value, |l| l.separation];
    for pick in picks {
        let ty: Vec<bool> = tl.iter().map(pick).collect();
        let hy: Vec<bool> = hl.iter().map(pick).collect();
        let clf = adaboost_train(&TrainingSet::from_rows(&tx, &ty).unwrap(), 20, None).unwrap();
        let scores: Vec<f64> = hx.iter().map(|x| clf.score_slice(x)).collect();
        let auc = roc_auc(&scores, &hy).unwrap();
        assert!((0.45..=0.55).contains(&auc), "auc {auc}");
    }
}
