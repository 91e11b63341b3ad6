//! `visage` — facial-landmark emotion analysis pipeline.
//!
//! Subcommands cover the full flow: validate landmark CSVs, export feature
//! matrices, compute per-emotion boxplot statistics, render SVG charts,
//! train single models, run stratified cross-validation, compare all
//! models, and generate synthetic datasets with known ground truth.
//!
//! Every flag can also come from a JSON config file (`--config`); explicit
//! flags win over config values, and unknown config keys are rejected.
//! All randomness derives from the single `--seed`. Logs go to standard
//! error; artifacts go to the output directory only.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use visage_core::evaluate::ModelSpec;
use visage_core::features::FeatureMode;
use visage_core::forest::Criterion;

use commands::{ChartKind, PlotKind, Policy};

#[derive(Parser)]
#[command(
    name = "visage",
    version,
    about = "Facial-landmark emotion analysis: statistics, charts, and classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a landmark CSV, curate (neutral, peak) pairs, and write a
    /// validation report
    Validate(ValidateArgs),
    /// Export the normalized feature matrix as CSV
    Features(FeaturesArgs),
    /// Per-emotion boxplot statistics and zone percentages (JSON + CSV)
    Stats(StatsArgs),
    /// Render SVG charts: landmark boxplot figures and the class
    /// distribution
    Plot(PlotArgs),
    /// Train one model on a stratified 75/25 split and save it
    Train(TrainArgs),
    /// Stratified k-fold cross-validation for one model
    Cv(CvArgs),
    /// Cross-validate every model in both feature modes and tabulate
    Compare(CompareArgs),
    /// Generate a synthetic landmark dataset from a spec (or the built-in
    /// separable-7 benchmark)
    Synth(SynthArgs),
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct Common {
    /// JSON config file merged beneath explicit flags; flags win
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed for all randomness; sub-seeds are derived from it
    /// (default: 0)
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Directory artifacts are written to (default: out)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Landmark CSV to validate (required here or in the config)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct FeaturesArgs {
    /// Landmark CSV to read (required here or in the config)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Feature mode: absolute | displacement (default: absolute)
    #[arg(long, value_name = "MODE")]
    mode: Option<FeatureMode>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct StatsArgs {
    /// Landmark CSV to read (required here or in the config)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Feature mode: absolute | displacement (default: absolute)
    #[arg(long, value_name = "MODE")]
    mode: Option<FeatureMode>,
    /// Restrict to one emotion (default: every emotion with ≥ 2 samples)
    #[arg(long, value_name = "NAME")]
    emotion: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PlotArgs {
    /// Landmark CSV to read (required here or in the config)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Feature mode for boxplot figures: absolute | displacement
    /// (default: absolute)
    #[arg(long, value_name = "MODE")]
    mode: Option<FeatureMode>,
    /// Restrict boxplot figures to one emotion (default: all with ≥ 2
    /// samples)
    #[arg(long, value_name = "NAME")]
    emotion: Option<String>,
    /// What to render: boxplot | distribution | all (default: all)
    #[arg(long, value_name = "KIND")]
    kind: Option<PlotKind>,
    /// Distribution chart style: bar | pie (default: pie)
    #[arg(long, value_name = "STYLE")]
    chart: Option<ChartKind>,
    #[command(flatten)]
    common: Common,
}

/// Model and preprocessing settings shared by train/cv/compare.
#[derive(Args)]
struct ModelOpts {
    /// Outlier handling before fitting: winsorize | drop | none
    /// (default: winsorize)
    #[arg(long, value_name = "POLICY")]
    policy: Option<Policy>,
    /// Tree split criterion: gini | entropy (default: gini)
    #[arg(long, value_name = "NAME")]
    criterion: Option<Criterion>,
    /// Maximum tree depth; 0 means unlimited (default: 0)
    #[arg(long, value_name = "N")]
    max_depth: Option<usize>,
    /// Minimum samples per tree leaf (default: 1)
    #[arg(long, value_name = "N")]
    min_samples_leaf: Option<usize>,
    /// Trees in the forest (default: 100)
    #[arg(long, value_name = "N")]
    trees: Option<usize>,
    /// Features sampled per forest split (default: 11)
    #[arg(long, value_name = "N")]
    features_per_split: Option<usize>,
    /// Bootstrap-resample each tree's training set: true | false
    /// (default: true)
    #[arg(long, value_name = "BOOL", num_args = 0..=1, default_missing_value = "true")]
    bootstrap: Option<bool>,
    /// Training epochs for neural models (default: 50)
    #[arg(long, value_name = "N")]
    epochs: Option<usize>,
    /// Minibatch size for neural models (default: 32)
    #[arg(long, value_name = "N")]
    batch_size: Option<usize>,
    /// Weight sample losses by inverse class frequency: true | false
    /// (default: false)
    #[arg(long, value_name = "BOOL", num_args = 0..=1, default_missing_value = "true")]
    class_weights: Option<bool>,
}

#[derive(Args)]
struct TrainArgs {
    /// Landmark CSV to read (required here or in the config)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Model: tree | forest | basic_nn | optimized_nn
    /// (default: optimized_nn)
    #[arg(long, value_name = "MODEL")]
    model: Option<ModelSpec>,
    /// Feature mode: absolute | displacement (default: absolute)
    #[arg(long, value_name = "MODE")]
    mode: Option<FeatureMode>,
    #[command(flatten)]
    opts: ModelOpts,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CvArgs {
    /// Landmark CSV to read (required here or in the config)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Model: tree | forest | basic_nn | optimized_nn
    /// (default: optimized_nn)
    #[arg(long, value_name = "MODEL")]
    model: Option<ModelSpec>,
    /// Feature mode: absolute | displacement (default: absolute)
    #[arg(long, value_name = "MODE")]
    mode: Option<FeatureMode>,
    /// Number of stratified folds (default: 4)
    #[arg(long, value_name = "N")]
    k: Option<usize>,
    #[command(flatten)]
    opts: ModelOpts,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CompareArgs {
    /// Landmark CSV to read (required here or in the config)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Number of stratified folds (default: 4)
    #[arg(long, value_name = "N")]
    k: Option<usize>,
    #[command(flatten)]
    opts: ModelOpts,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SynthArgs {
    /// Generator spec JSON; omitted = built-in separable-7 benchmark
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Output CSV path (default: synth.csv); unlike other commands this
    /// names a file, matching the dataset CSVs other commands consume
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write the effective spec JSON here, e.g. as an editable template
    #[arg(long, value_name = "FILE")]
    write_spec: Option<PathBuf>,
    /// Seed override; replaces the spec's own seed when given (default:
    /// the spec's seed, or 0 for the built-in benchmark)
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// JSON config file merged beneath explicit flags; flags win
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Validate(a) => commands::validate(a),
        Cmd::Features(a) => commands::features(a),
        Cmd::Stats(a) => commands::stats(a),
        Cmd::Plot(a) => commands::plot(a),
        Cmd::Train(a) => commands::train(a),
        Cmd::Cv(a) => commands::cv(a),
        Cmd::Compare(a) => commands::compare(a),
        Cmd::Synth(a) => commands::synth(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
