use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde_json::{json, Map, Value};

use reserve_core::cascade::{CascadeLimits, CascadeParams, StageBudget};
use reserve_core::featurization::{
    filter_outliers, read_jsonl, write_jsonl, BucketSchema, BuyerGroupMap, FitOptions, RawRecord,
};
use reserve_core::policy::{
    evaluate_policy, recommend_reserve, train_policy, write_decision_log, GateOrder, PolicyConfig,
    PolicyModels, ReservePolicy, TrainOptions,
};
use reserve_core::simulator::{
    compute_lift, generate_synthetic_logs, grid_search_cutoffs, replay, split_records,
    write_grid_csv, write_revenue_csv, DataSplit, GridSpec, ReplayOptions, SplitFractions,
    SyntheticConfig,
};
use reserve_core::Money;

use crate::args::{
    EvaluateArgs, GateOrderArg, GenerateArgs, ModelArgs, ReplayArgs, SplitArgs, SplitName,
    SweepArgs, TrainArgs,
};
use crate::error::CliError;
use crate::output::Artifacts;

type Config = Map<String, Value>;

pub fn generate(args: &GenerateArgs, config: &Config) -> Result<(), CliError> {
    let synth = SyntheticConfig {
        n_records: args.n,
        seed: args.seed,
        high_value_fraction: args.high_value_fraction,
        feature_signal_strength: args.feature_signal_strength,
        high_value_cutoff: args.high_value_cutoff,
        outlier_cap: args.outlier_cap,
        low_log_location: args.low_log_location,
        low_log_spread: args.low_log_spread,
        high_log_location: args.high_log_location,
        high_log_spread: args.high_log_spread,
        gap_scale: args.gap_scale,
        gap_signal: args.gap_signal,
        systemwide_reserve: args.systemwide_reserve,
        deal_fraction: args.deal_fraction,
        first_record_id: args.first_record_id,
    };
    let logs = generate_synthetic_logs(&synth)?;
    let mut jsonl = Vec::new();
    write_jsonl(&mut jsonl, &logs.records)?;
    let mut groups = serde_json::to_vec_pretty(&logs.buyer_groups).expect("group map serializes");
    groups.push(b'\n');

    let high_value = logs
        .records
        .iter()
        .filter(|r| r.bids.top() >= args.high_value_cutoff)
        .count();
    let mut artifacts = Artifacts::default();
    artifacts.add(&args.out, jsonl);
    artifacts.add(&args.groups_out, groups);
    let mut notes = Map::new();
    notes.insert("records".into(), json!(logs.records.len()));
    notes.insert("high_value_records".into(), json!(high_value));
    artifacts.commit("generate", config, notes, &args.manifest)?;
    println!(
        "generated {} auctions ({} high-value) -> {}",
        logs.records.len(),
        high_value,
        args.out.display()
    );
    Ok(())
}

fn load_records(path: &Path) -> Result<Vec<RawRecord>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_jsonl(BufReader::new(file))
        .map_err(|e| CliError::new("parse", format!("{}: {e}", path.display())))
}

fn load_groups(path: &Path) -> Result<BuyerGroupMap, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::new("parse", format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<PolicyModels, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    PolicyModels::from_json(&text).map_err(|e| {
        let err: CliError = e.into();
        CliError::new(err.kind, format!("{}: {}", path.display(), err.message))
    })
}

fn split_all(records: &[RawRecord], args: &SplitArgs) -> Result<DataSplit, CliError> {
    let fractions = SplitFractions {
        train: args.train_fraction,
        validation: args.validation_fraction,
    };
    Ok(split_records(records, args.split_seed, fractions)?)
}

fn select_split(
    records: Vec<RawRecord>,
    which: SplitName,
    args: &SplitArgs,
) -> Result<Vec<RawRecord>, CliError> {
    if which == SplitName::All {
        return Ok(records);
    }
    let split = split_all(&records, args)?;
    Ok(match which {
        SplitName::Train => split.train,
        SplitName::Validation => split.validation,
        SplitName::Holdout => split.holdout,
        SplitName::All => unreachable!(),
    })
}

fn parse_money_list(list: &str, what: &str) -> Result<Vec<Money>, CliError> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<Money>()
                .map_err(|e| CliError::config(format!("{what}: `{s}`: {e}")))
        })
        .collect()
}

fn train_options(m: &ModelArgs) -> Result<TrainOptions, CliError> {
    let buckets = BucketSchema {
        price_edges: parse_money_list(&m.price_edges, "price-edges")?,
        high_value_cutoff: m.high_value_cutoff,
        gap_cutoff: m.gap_cutoff,
        outlier_cap: m.outlier_cap,
    };
    buckets.validate()?;
    let cascade = CascadeParams {
        max_stage_fpr: m.max_stage_fpr,
        min_stage_tpr: m.min_stage_tpr,
        target_fpr: m.target_fpr,
    };
    let mut options = TrainOptions::new(buckets, cascade);
    options.limits = CascadeLimits {
        max_stages: m.max_stages,
        max_stumps_per_stage: m.max_stumps_per_stage,
        budget: StageBudget::Doubling {
            start: m.stage_budget_start,
        },
    };
    options.separation_rounds = m.separation_rounds;
    options.bucket_rounds = m.bucket_rounds;
    options.fit = FitOptions {
        one_hot_max: m.one_hot_max,
    };
    options.policy = PolicyConfig {
        bucket_position: m.bucket_position,
        gate_order: match m.gate_order {
            GateOrderArg::SeparationFirst => GateOrder::SeparationFirst,
            GateOrderArg::HighValueFirst => GateOrder::HighValueFirst,
        },
    };
    Ok(options)
}

fn load_filtered(path: &Path, cap: Money) -> Result<Vec<RawRecord>, CliError> {
    let report = filter_outliers(load_records(path)?, cap);
    if report.removed > 0 {
        log::info!(
            "dropped {} auctions above the outlier cap {cap}",
            report.removed
        );
    }
    Ok(report.kept)
}

pub fn train(args: &TrainArgs, config: &Config) -> Result<(), CliError> {
    let options = train_options(&args.model)?;
    let records = load_filtered(&args.logs, args.model.outlier_cap)?;
    let groups = load_groups(&args.groups)?;
    let split = split_all(&records, &args.split)?;
    log::info!(
        "training on {} auctions, validating on {} ({} held out)",
        split.train.len(),
        split.validation.len(),
        split.holdout.len()
    );
    let training = train_policy(&split.train, &split.validation, groups, &options)?;

    let mut log_text = String::new();
    for entry in &training.cascade_log {
        log_text.push_str(&entry.to_string());
        log_text.push('\n');
    }
    let mut notes = Map::new();
    notes.insert(
        "cascade_stages".into(),
        json!(training.models.high_value.stages.len()),
    );
    if let Some(reason) = &training.cascade_halt {
        log::warn!("using the partial cascade: {reason}");
        log_text.push_str(&format!("halted: {reason}\n"));
        notes.insert("cascade_halted".into(), json!(reason.to_string()));
    }
    let mut model = training.models.to_json().into_bytes();
    model.push(b'\n');

    let mut artifacts = Artifacts::default();
    artifacts.add(&args.out, model);
    artifacts.add(&args.log_out, log_text.into_bytes());
    artifacts.commit("train", config, notes, &args.manifest)?;
    println!(
        "trained: separation_rounds={} cascade_stages={} halted={} -> {}",
        training.models.separation.stages.len(),
        training.models.high_value.stages.len(),
        training.cascade_halt.is_some(),
        args.out.display()
    );
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs, config: &Config) -> Result<(), CliError> {
    let models = load_model(&args.model)?;
    let records = load_filtered(&args.logs, models.buckets.outlier_cap)?;
    let records = select_split(records, args.split, &args.split_args)?;
    let eval = evaluate_policy(&models, &records)?;
    let decisions = records
        .iter()
        .map(|r| Ok((r.record_id, recommend_reserve(r, &models)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut csv = Vec::new();
    write_decision_log(&mut csv, &decisions)?;
    let changed = decisions.iter().filter(|(_, d)| d.changed).count();

    let mut metrics = serde_json::to_vec_pretty(&json!({
        "split": args.split,
        "evaluation": eval,
        "changed_reserves": changed,
    }))
    .expect("metrics serialize");
    metrics.push(b'\n');
    let mut artifacts = Artifacts::default();
    artifacts.add(&args.out, metrics);
    artifacts.add(&args.decisions, csv);
    artifacts.commit("evaluate", config, Map::new(), &args.manifest)?;
    println!(
        "separation_auc={:.6} separation_error={:.6} separation_error_bound={:.6} high_value_auc={:.6} \
         cascade_detection={:.6} cascade_false_positive={:.6} bucket_accuracy={:.6} changed={}",
        eval.separation_auc,
        eval.separation_error,
        eval.separation_error_bound,
        eval.high_value_auc,
        eval.cascade.detection,
        eval.cascade.false_positive,
        eval.bucket_accuracy,
        changed
    );
    Ok(())
}

pub fn run_replay(args: &ReplayArgs, config: &Config) -> Result<(), CliError> {
    let models = if args.policy == "none" {
        None
    } else {
        Some(load_model(Path::new(&args.policy))?)
    };
    let records = load_records(&args.logs)?;
    let records = select_split(records, args.split, &args.split_args)?;
    let options = ReplayOptions {
        high_value_cutoff: models
            .as_ref()
            .map_or(args.high_value_cutoff, |m| m.buckets.high_value_cutoff),
        sample_rate: args.sample_rate,
        sample_seed: args.sample_seed,
        keep_decisions: false,
        ..ReplayOptions::default()
    };
    let policy = models.as_ref().map(|m| m as &dyn ReservePolicy);
    let outcome = replay(&records, policy, &options)?;
    let lift = compute_lift(&outcome.policy, &outcome.baseline)?;

    let mut report = serde_json::to_vec_pretty(&json!({
        "baseline": outcome.baseline,
        "policy": outcome.policy,
        "lift": lift,
        "lost_to_blocking": outcome.lost_to_blocking,
        "unchanged_mismatches": outcome.unchanged_mismatches,
    }))
    .expect("report serializes");
    report.push(b'\n');
    let mut csv = Vec::new();
    write_revenue_csv(&mut csv, &outcome)?;
    let mut artifacts = Artifacts::default();
    artifacts.add(&args.out, report);
    artifacts.add(&args.csv, csv);
    artifacts.commit("replay", config, Map::new(), &args.manifest)?;
    println!(
        "baseline={} policy={} lift absolute={} relative={:.6}",
        outcome.baseline.total_revenue,
        outcome.policy.total_revenue,
        lift.absolute_lift,
        lift.relative_lift
    );
    Ok(())
}

pub fn sweep(args: &SweepArgs, config: &Config) -> Result<(), CliError> {
    let base = train_options(&args.model)?;
    let grid = GridSpec {
        high_value_cutoffs: parse_money_list(&args.high_value_cutoffs, "high-value-cutoffs")?,
        gap_cutoffs: parse_money_list(&args.gap_cutoffs, "gap-cutoffs")?,
    };
    let records = load_filtered(&args.logs, args.model.outlier_cap)?;
    let groups = load_groups(&args.groups)?;
    let split = split_all(&records, &args.split)?;
    let search = grid_search_cutoffs(&split, &groups, &base, &ReplayOptions::default(), &grid)?;
    for p in search.points.iter().filter(|p| p.skipped.is_some()) {
        log::warn!(
            "skipped high_value_cutoff={} gap_cutoff={}: {}",
            p.high_value_cutoff,
            p.gap_cutoff,
            p.skipped.as_deref().unwrap_or_default()
        );
    }
    let mut csv = Vec::new();
    write_grid_csv(&mut csv, &search)?;
    let mut notes = Map::new();
    if let Some(best) = search.best_point() {
        notes.insert(
            "best_high_value_cutoff".into(),
            json!(best.high_value_cutoff),
        );
        notes.insert("best_gap_cutoff".into(), json!(best.gap_cutoff));
    }
    let mut artifacts = Artifacts::default();
    artifacts.add(&args.out, csv);
    artifacts.commit("sweep", config, notes, &args.manifest)?;
    match search.best_point() {
        Some(best) => println!(
            "best high_value_cutoff={} gap_cutoff={} relative_lift={:.6}",
            best.high_value_cutoff,
            best.gap_cutoff,
            best.lift.map_or(0.0, |l| l.relative_lift)
        ),
        None => println!("no grid point could be evaluated"),
    }
    Ok(())
}
