use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use reserve_core::Money;

#[derive(Debug, Parser)]
#[command(
    name = "reserve",
    version,
    about = "Train and replay reserve-price policies on auction logs"
)]
pub struct Cli {
    /// Flat JSON config; keys match the long flag names. Explicit flags win.
    /// A manifest written by an earlier run is accepted as well.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads [default: number of CPUs]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write seeded synthetic auction logs (JSONL) and the buyer-group map.
    Generate(GenerateArgs),
    /// Fit the feature schema, separation classifier, high-value cascade and bucket predictors.
    Train(TrainArgs),
    /// AUCs, cascade rates and the per-auction decision log.
    Evaluate(EvaluateArgs),
    /// Replay logs under static reserves and under a policy; report revenue and lift.
    Replay(ReplayArgs),
    /// Grid search over high-value and gap cutoffs.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Train(_) => "train",
            Command::Evaluate(_) => "evaluate",
            Command::Replay(_) => "replay",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GenerateArgs {
    /// Output log file (JSONL)
    #[arg(long, default_value = "logs.jsonl")]
    pub out: PathBuf,
    /// Output buyer-group map (JSON)
    #[arg(long, default_value = "buyer_groups.json")]
    pub groups_out: PathBuf,
    /// Manifest path
    #[arg(long, default_value = "generate.manifest.json")]
    pub manifest: PathBuf,
    /// Number of auctions
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Share of auctions whose top bid reaches the high-value cutoff
    #[arg(long, default_value_t = 0.05)]
    pub high_value_fraction: f64,
    /// How strongly features determine the top bid and the gap, in [0, 1]
    #[arg(long, default_value_t = 0.8)]
    pub feature_signal_strength: f64,
    #[arg(long, default_value_t = Money::whole(10))]
    pub high_value_cutoff: Money,
    #[arg(long, default_value_t = Money::whole(41))]
    pub outlier_cap: Money,
    /// Log-scale location of low-value top bids
    #[arg(long, default_value_t = 0.2)]
    pub low_log_location: f64,
    #[arg(long, default_value_t = 0.6)]
    pub low_log_spread: f64,
    /// Log-scale location of the excess over the cutoff for high-value top bids
    #[arg(long, default_value_t = 0.9)]
    pub high_log_location: f64,
    #[arg(long, default_value_t = 0.7)]
    pub high_log_spread: f64,
    /// Mean gap as a fraction of the top bid
    #[arg(long, default_value_t = 0.35)]
    pub gap_scale: f64,
    #[arg(long, default_value_t = 1.2)]
    pub gap_signal: f64,
    #[arg(long, default_value = "0.05")]
    pub systemwide_reserve: Money,
    /// Share of auctions carrying a deal reserve
    #[arg(long, default_value_t = 0.03)]
    pub deal_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub first_record_id: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitName {
    All,
    Train,
    Validation,
    Holdout,
}

/// Seeded hash split shared by train, evaluate, replay and sweep.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SplitArgs {
    #[arg(long, default_value_t = 7)]
    pub split_seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 0.2)]
    pub validation_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateOrderArg {
    SeparationFirst,
    HighValueFirst,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ModelArgs {
    /// Ascending price bucket edges, comma separated
    #[arg(long, default_value = "0,1,2,5,10,15,20,41")]
    pub price_edges: String,
    #[arg(long, default_value_t = Money::whole(10))]
    pub high_value_cutoff: Money,
    #[arg(long, default_value_t = Money::whole(2))]
    pub gap_cutoff: Money,
    /// Auctions with a higher top bid are dropped before training
    #[arg(long, default_value_t = Money::whole(41))]
    pub outlier_cap: Money,
    /// Per-stage false-positive ceiling f
    #[arg(long, default_value_t = 0.52)]
    pub max_stage_fpr: f64,
    /// Per-stage detection floor d
    #[arg(long, default_value_t = 0.95)]
    pub min_stage_tpr: f64,
    /// Overall cascade false-positive target
    #[arg(long, default_value_t = 0.01)]
    pub target_fpr: f64,
    #[arg(long, default_value_t = 25)]
    pub max_stages: usize,
    #[arg(long, default_value_t = 400)]
    pub max_stumps_per_stage: usize,
    /// Stumps in the first stage; doubles each stage
    #[arg(long, default_value_t = 2)]
    pub stage_budget_start: usize,
    #[arg(long, default_value_t = 40)]
    pub separation_rounds: usize,
    #[arg(long, default_value_t = 20)]
    pub bucket_rounds: usize,
    /// Categorical fields with at most this many values are one-hot encoded
    #[arg(long, default_value_t = 16)]
    pub one_hot_max: usize,
    /// Reserve position inside the predicted bucket: 0 floor, 1 ceiling
    #[arg(long, default_value_t = 0.0)]
    pub bucket_position: f64,
    #[arg(long, value_enum, default_value_t = GateOrderArg::SeparationFirst)]
    pub gate_order: GateOrderArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TrainArgs {
    #[arg(long, default_value = "logs.jsonl")]
    pub logs: PathBuf,
    #[arg(long, default_value = "buyer_groups.json")]
    pub groups: PathBuf,
    /// Output model (JSON)
    #[arg(long, default_value = "model.json")]
    pub out: PathBuf,
    /// Per-stage cascade training log
    #[arg(long, default_value = "train_log.txt")]
    pub log_out: PathBuf,
    #[arg(long, default_value = "train.manifest.json")]
    pub manifest: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub split: SplitArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EvaluateArgs {
    #[arg(long, default_value = "model.json")]
    pub model: PathBuf,
    #[arg(long, default_value = "logs.jsonl")]
    pub logs: PathBuf,
    /// Which part of the seeded split to evaluate on
    #[arg(long, value_enum, default_value_t = SplitName::Holdout)]
    pub split: SplitName,
    #[command(flatten)]
    #[serde(flatten)]
    pub split_args: SplitArgs,
    /// Metrics output (JSON)
    #[arg(long, default_value = "metrics.json")]
    pub out: PathBuf,
    /// Decision log (CSV)
    #[arg(long, default_value = "decisions.csv")]
    pub decisions: PathBuf,
    #[arg(long, default_value = "evaluate.manifest.json")]
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReplayArgs {
    /// Model JSON, or "none" for the static-reserve baseline
    #[arg(long, default_value = "none")]
    pub policy: String,
    #[arg(long, default_value = "logs.jsonl")]
    pub logs: PathBuf,
    #[arg(long, value_enum, default_value_t = SplitName::Holdout)]
    pub split: SplitName,
    #[command(flatten)]
    #[serde(flatten)]
    pub split_args: SplitArgs,
    /// Fraction of auctions replayed, chosen by hashing the record id
    #[arg(long, default_value_t = 1.0)]
    pub sample_rate: f64,
    #[arg(long, default_value_t = 0)]
    pub sample_seed: u64,
    /// Segment cutoff when no policy is given; a model uses its own
    #[arg(long, default_value_t = Money::whole(10))]
    pub high_value_cutoff: Money,
    /// Revenue report (JSON)
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    /// Revenue report (CSV)
    #[arg(long, default_value = "report.csv")]
    pub csv: PathBuf,
    #[arg(long, default_value = "replay.manifest.json")]
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    #[arg(long, default_value = "logs.jsonl")]
    pub logs: PathBuf,
    #[arg(long, default_value = "buyer_groups.json")]
    pub groups: PathBuf,
    /// High-value cutoffs to try, comma separated
    #[arg(long, default_value = "5,10,15")]
    pub high_value_cutoffs: String,
    /// Gap cutoffs to try, comma separated
    #[arg(long, default_value = "1,2,3")]
    pub gap_cutoffs: String,
    /// Grid results (CSV)
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
    #[arg(long, default_value = "sweep.manifest.json")]
    pub manifest: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub split: SplitArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
}
