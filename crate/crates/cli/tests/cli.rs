use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn reserve(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reserve"))
        .current_dir(dir)
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = reserve(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing in {line}"))
        .parse()
        .unwrap()
}

fn pipeline(dir: &Path) {
    ok(
        dir,
        &[
            "generate",
            "--n",
            "20000",
            "--seed",
            "3",
            "--feature-signal-strength",
            "0.9",
        ],
    );
    ok(dir, &["train", "--target-fpr", "0.05"]);
}

#[test]
fn generate_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        ok(d.path(), &["generate", "--n", "3000", "--seed", "9"]);
    }
    for f in ["logs.jsonl", "buyer_groups.json", "generate.manifest.json"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let lines = fs::read_to_string(a.path().join("logs.jsonl"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(lines, 3000);
}

#[test]
fn training_error_respects_the_boosting_bound() {
    let d = TempDir::new().unwrap();
    pipeline(d.path());
    let line = ok(d.path(), &["evaluate", "--split", "train"]);
    assert!(
        field(&line, "separation_error") <= field(&line, "separation_error_bound") + 1e-12,
        "{line}"
    );
    let metrics: serde_json::Value =
        serde_json::from_slice(&fs::read(d.path().join("metrics.json")).unwrap()).unwrap();
    assert!(metrics["evaluation"]["high_value_auc"].as_f64().unwrap() > 0.5);
    assert!(d.path().join("decisions.csv").exists());
}

#[test]
fn replay_prints_the_report_lift() {
    let d = TempDir::new().unwrap();
    pipeline(d.path());
    let line = ok(d.path(), &["replay", "--policy", "model.json"]);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(d.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(
        field(&line, "baseline"),
        report["baseline"]["total_revenue"].as_f64().unwrap()
    );
    assert_eq!(
        field(&line, "policy"),
        report["policy"]["total_revenue"].as_f64().unwrap()
    );
    let relative = report["lift"]["relative_lift"].as_f64().unwrap();
    assert!((field(&line, "relative") - relative).abs() < 1e-6, "{line}");
    assert_eq!(report["unchanged_mismatches"], 0);
    let csv = fs::read_to_string(d.path().join("report.csv")).unwrap();
    // header, then three segments and a total for each run
    assert_eq!(csv.lines().count(), 1 + 2 * 4);

    let line = ok(
        d.path(),
        &[
            "replay",
            "--out",
            "none.json",
            "--csv",
            "none.csv",
            "--manifest",
            "none.manifest.json",
        ],
    );
    assert_eq!(field(&line, "relative"), 0.0);
}

#[test]
fn unknown_flag_is_a_single_line_error() {
    let d = TempDir::new().unwrap();
    let out = reserve(d.path(), &["generate", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.starts_with("error: kind=usage"), "{err}");
}

#[test]
fn missing_input_leaves_no_artifacts() {
    let d = TempDir::new().unwrap();
    let out = reserve(d.path(), &["train", "--logs", "absent.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("kind=io"), "{err}");
    assert_eq!(fs::read_dir(d.path()).unwrap().count(), 0);
}

#[test]
fn help_lists_defaults() {
    let d = TempDir::new().unwrap();
    let help = ok(d.path(), &["train", "--help"]);
    assert!(help.contains("--max-stage-fpr"));
    assert!(help.contains("[default: 0.52]"));
    assert!(help.contains("[default: 0,1,2,5,10,15,20,41]"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("cfg.json"), r#"{"n": 500, "seed": 4}"#).unwrap();
    ok(
        d.path(),
        &["--config", "cfg.json", "generate", "--n", "800"],
    );
    let lines = fs::read_to_string(d.path().join("logs.jsonl"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(lines, 800);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(d.path().join("generate.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["seed"], 4);

    fs::write(d.path().join("bad.json"), r#"{"no-such-key": 1}"#).unwrap();
    let out = reserve(d.path(), &["--config", "bad.json", "generate"]);
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("kind=config"));

    // a manifest replays its own configuration
    let e = TempDir::new().unwrap();
    fs::copy(
        d.path().join("generate.manifest.json"),
        e.path().join("m.json"),
    )
    .unwrap();
    ok(
        e.path(),
        &[
            "--config",
            "m.json",
            "generate",
            "--manifest",
            "generate.manifest.json",
        ],
    );
    assert_eq!(
        fs::read(d.path().join("logs.jsonl")).unwrap(),
        fs::read(e.path().join("logs.jsonl")).unwrap()
    );
}
