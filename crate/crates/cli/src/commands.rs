//! Subcommand implementations. Each resolves its settings (flags over
//! config over defaults), loads what it needs, logs progress to stderr,
//! and writes artifacts under the output directory.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use visage_core::dataset::{
    class_distribution, parse_dataset, validate as curate, EmotionLabel, ValidationReport,
};
use visage_core::evaluate::{
    accuracy, comparison_markdown, cross_validate, stratified_kfold, CvOptions, ModelSpec,
};
use visage_core::features::{build_feature_matrix, write_feature_csv, FeatureMode};
use visage_core::forest::{fit_forest, fit_tree, ForestParams, TreeParams};
use visage_core::neural::{build_basic_model, build_optimized_model, train_with, Checkpoint};
use visage_core::plots::{
    render_distribution, render_landmark_boxplot, render_learning_curves, DistributionKind,
};
use visage_core::stats::{
    emotion_landmark_analysis, emotion_landmark_stats, handle_outliers, OutlierPolicy, StatsReport,
};
use visage_core::{synth, CuratedDataset, Matrix, TrainConfig, CLASS_COUNT};

use crate::config::{pick, pick_parsed, require, FileConfig};
use crate::{
    Common, CompareArgs, CvArgs, FeaturesArgs, ModelOpts, PlotArgs, StatsArgs, SynthArgs,
    TrainArgs, ValidateArgs,
};

/// Outlier treatment applied to the feature matrix before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Winsorize,
    Drop,
    None,
}

impl Policy {
    fn to_op(self) -> Option<OutlierPolicy> {
        match self {
            Policy::Winsorize => Some(OutlierPolicy::Winsorize),
            Policy::Drop => Some(OutlierPolicy::Drop),
            Policy::None => None,
        }
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Policy, String> {
        match s.to_ascii_lowercase().as_str() {
            "winsorize" => Ok(Policy::Winsorize),
            "drop" => Ok(Policy::Drop),
            "none" => Ok(Policy::None),
            _ => Err(format!(
                "unknown outlier policy '{s}' (expected winsorize, drop, or none)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Boxplot,
    Distribution,
    All,
}

impl FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<PlotKind, String> {
        match s.to_ascii_lowercase().as_str() {
            "boxplot" => Ok(PlotKind::Boxplot),
            "distribution" => Ok(PlotKind::Distribution),
            "all" => Ok(PlotKind::All),
            _ => Err(format!(
                "unknown plot kind '{s}' (expected boxplot, distribution, or all)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Bar,
    Pie,
}

impl From<ChartKind> for DistributionKind {
    fn from(kind: ChartKind) -> DistributionKind {
        match kind {
            ChartKind::Bar => DistributionKind::Bar,
            ChartKind::Pie => DistributionKind::Pie,
        }
    }
}

impl FromStr for ChartKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<ChartKind, String> {
        match s.to_ascii_lowercase().as_str() {
            "bar" => Ok(ChartKind::Bar),
            "pie" => Ok(ChartKind::Pie),
            _ => Err(format!("unknown chart style '{s}' (expected bar or pie)")),
        }
    }
}

/// Settings shared by every subcommand, post-merge.
struct Ctx {
    cfg: FileConfig,
    seed: u64,
    out: PathBuf,
}

fn resolve_common(common: &Common) -> Result<Ctx> {
    let cfg = FileConfig::load(common.config.as_deref())?;
    let seed = pick(common.seed, cfg.seed, 0);
    let out = pick(common.out.clone(), cfg.out.clone(), PathBuf::from("out"));
    Ok(Ctx { cfg, seed, out })
}

fn load_dataset(input: &Path) -> Result<(CuratedDataset, ValidationReport)> {
    let file = File::open(input).with_context(|| format!("opening {}", input.display()))?;
    let frames = parse_dataset::<f64, _>(BufReader::new(file))
        .with_context(|| format!("parsing {}", input.display()))?;
    let total = frames.len();
    let (dataset, report) = curate(frames);
    eprintln!(
        "curated {} records from {} frames in {} ({} groups rejected)",
        dataset.len(),
        total,
        input.display(),
        report.rejected.len()
    );
    Ok((dataset, report))
}

fn load_nonempty(input: &Path) -> Result<CuratedDataset> {
    let (dataset, _) = load_dataset(input)?;
    if dataset.is_empty() {
        bail!("no curated records in {}", input.display());
    }
    Ok(dataset)
}

fn write_artifact(out_dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let path = out_dir.join(name);
    std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(path)
}

/// The emotions a per-emotion analysis covers: the requested one, or every
/// emotion with enough samples (singletons are reported and skipped).
fn emotions_for(dataset: &CuratedDataset, requested: Option<&str>) -> Result<Vec<EmotionLabel>> {
    if let Some(name) = requested {
        return Ok(vec![name.parse::<EmotionLabel>()?]);
    }
    let mut counts = [0usize; CLASS_COUNT];
    for record in &dataset.records {
        counts[record.emotion.index()] += 1;
    }
    let mut picked = Vec::new();
    for (i, &count) in counts.iter().enumerate() {
        let emotion = EmotionLabel::from_index(i).expect("canonical index");
        if count >= 2 {
            picked.push(emotion);
        } else if count == 1 {
            eprintln!("skipping '{emotion}': landmark statistics need at least 2 samples");
        }
    }
    if picked.is_empty() {
        bail!("no emotion has at least 2 samples");
    }
    Ok(picked)
}

fn apply_policy(x: Matrix, y: Vec<usize>, policy: Policy) -> Result<(Matrix, Vec<usize>)> {
    let Some(op) = policy.to_op() else {
        return Ok((x, y));
    };
    let outcome = handle_outliers(&x, &y, op)?;
    match op {
        OutlierPolicy::Winsorize => eprintln!("winsorized features into per-column fences"),
        OutlierPolicy::Drop => eprintln!(
            "dropped {} rows containing outlier coordinates",
            outcome.removed.len()
        ),
    }
    Ok((outcome.matrix, outcome.labels))
}

/// Merge model/preprocessing settings. The master seed lands in every
/// sub-config; fold-level refinements (seed + fold) happen downstream.
fn resolve_model_opts(opts: &ModelOpts, cfg: &FileConfig, seed: u64) -> Result<(CvOptions, Policy)> {
    let criterion = pick_parsed(
        opts.criterion,
        cfg.criterion.as_deref(),
        visage_core::forest::Criterion::Gini,
        "criterion",
    )?;
    let depth = pick(opts.max_depth, cfg.max_depth, 0);
    let tree = TreeParams {
        criterion,
        max_depth: (depth > 0).then_some(depth),
        min_samples_leaf: pick(opts.min_samples_leaf, cfg.min_samples_leaf, 1),
        rng_seed: seed,
    };
    let forest = ForestParams {
        n_trees: pick(opts.trees, cfg.trees, 100),
        tree: tree.clone(),
        features_per_split: pick(opts.features_per_split, cfg.features_per_split, 11),
        bootstrap: pick(opts.bootstrap, cfg.bootstrap, true),
        rng_seed: seed,
    };
    let train = TrainConfig {
        epochs: pick(opts.epochs, cfg.epochs, 50),
        batch_size: pick(opts.batch_size, cfg.batch_size, 32),
        seed,
        class_weighting: pick(opts.class_weights, cfg.class_weights, false),
    };
    let policy = pick_parsed(opts.policy, cfg.policy.as_deref(), Policy::Winsorize, "policy")?;
    Ok((CvOptions { tree, forest, train }, policy))
}

pub fn validate(args: ValidateArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let input = require(args.input, ctx.cfg.input.clone(), "input")?;
    let (_, report) = load_dataset(&input)?;
    write_artifact(&ctx.out, "validation.json", format!("{}\n", report.to_json()).as_bytes())?;
    Ok(())
}

pub fn features(args: FeaturesArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let input = require(args.input, ctx.cfg.input.clone(), "input")?;
    let mode = pick_parsed(args.mode, ctx.cfg.mode.as_deref(), FeatureMode::Absolute, "mode")?;
    let dataset = load_nonempty(&input)?;
    let mut buf = Vec::new();
    write_feature_csv(&dataset, mode, &mut buf)?;
    write_artifact(&ctx.out, &format!("features_{mode}.csv"), &buf)?;
    Ok(())
}

pub fn stats(args: StatsArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let input = require(args.input, ctx.cfg.input.clone(), "input")?;
    let mode = pick_parsed(args.mode, ctx.cfg.mode.as_deref(), FeatureMode::Absolute, "mode")?;
    let emotion = args.emotion.or(ctx.cfg.emotion.clone());
    let dataset = load_nonempty(&input)?;

    let mut tables = Vec::new();
    for e in emotions_for(&dataset, emotion.as_deref())? {
        let table = emotion_landmark_stats(&dataset, e, mode)?;
        eprintln!(
            "{e}: {:.2}% in quartiles / {:.2}% in whiskers / {:.2}% outliers over {} points",
            table.in_quartiles_pct, table.in_whiskers_pct, table.outlier_pct, table.total_points
        );
        tables.push(table);
    }
    let report = StatsReport { mode, emotions: tables };
    write_artifact(
        &ctx.out,
        &format!("stats_{mode}.json"),
        format!("{}\n", report.to_json()).as_bytes(),
    )?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    write_artifact(&ctx.out, &format!("stats_{mode}.csv"), &csv)?;
    Ok(())
}

pub fn plot(args: PlotArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let input = require(args.input, ctx.cfg.input.clone(), "input")?;
    let mode = pick_parsed(args.mode, ctx.cfg.mode.as_deref(), FeatureMode::Absolute, "mode")?;
    let emotion = args.emotion.or(ctx.cfg.emotion.clone());
    let kind = pick_parsed(args.kind, ctx.cfg.kind.as_deref(), PlotKind::All, "kind")?;
    let chart = pick_parsed(args.chart, ctx.cfg.chart.as_deref(), ChartKind::Pie, "chart")?;
    let dataset = load_nonempty(&input)?;

    if matches!(kind, PlotKind::Boxplot | PlotKind::All) {
        for e in emotions_for(&dataset, emotion.as_deref())? {
            let (table, marks) = emotion_landmark_analysis(&dataset, e, mode)?;
            let svg = render_landmark_boxplot(&table, &marks)?;
            write_artifact(
                &ctx.out,
                &format!("{e}_{mode}_boxplot.svg"),
                svg.to_svg_string().as_bytes(),
            )?;
        }
    }
    if matches!(kind, PlotKind::Distribution | PlotKind::All) {
        let summary = class_distribution(&dataset)?;
        let svg = render_distribution(&summary, chart.into())?;
        write_artifact(&ctx.out, "class_distribution.svg", svg.to_svg_string().as_bytes())?;
    }
    Ok(())
}

pub fn train(args: TrainArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let input = require(args.input, ctx.cfg.input.clone(), "input")?;
    let mode = pick_parsed(args.mode, ctx.cfg.mode.as_deref(), FeatureMode::Absolute, "mode")?;
    let model = pick_parsed(args.model, ctx.cfg.model.as_deref(), ModelSpec::OptimizedNn, "model")?;
    let (options, policy) = resolve_model_opts(&args.opts, &ctx.cfg, ctx.seed)?;
    let dataset = load_nonempty(&input)?;

    let (x_all, y_all) = build_feature_matrix(&dataset, mode)?;
    let (x, y) = apply_policy(x_all, y_all, policy)?;

    // Deterministic stratified quarter hold-out: fold 0 of 4 is the test
    // split, everything else trains.
    let folds = stratified_kfold(&y, 4, ctx.seed)?;
    let train_idx = folds.train_indices(0);
    let test_idx = folds.test_indices(0);
    let x_train = x.select_rows(&train_idx);
    let y_train: Vec<usize> = train_idx.iter().map(|&i| y[i]).collect();
    let x_test = x.select_rows(&test_idx);
    let y_test: Vec<usize> = test_idx.iter().map(|&i| y[i]).collect();
    eprintln!(
        "training {model} on {mode} features: {} train / {} test samples",
        y_train.len(),
        y_test.len()
    );

    match model {
        ModelSpec::Tree => {
            let fitted = fit_tree(&x_train, &y_train, &options.tree, CLASS_COUNT)?;
            let train_acc = accuracy(&fitted.predict_batch(&x_train), &y_train)?;
            let test_acc = accuracy(&fitted.predict_batch(&x_test), &y_test)?;
            eprintln!("tree: train_acc {train_acc:.4} test_acc {test_acc:.4}");
            let json = serde_json::to_string_pretty(&fitted)?;
            write_artifact(&ctx.out, &format!("model_tree_{mode}.json"), format!("{json}\n").as_bytes())?;
        }
        ModelSpec::Forest => {
            let fitted = fit_forest(&x_train, &y_train, &options.forest, CLASS_COUNT)?;
            let train_acc = accuracy(&fitted.predict_batch(&x_train), &y_train)?;
            let test_acc = accuracy(&fitted.predict_batch(&x_test), &y_test)?;
            eprintln!("forest: train_acc {train_acc:.4} test_acc {test_acc:.4}");
            let json = serde_json::to_string_pretty(&fitted)?;
            write_artifact(&ctx.out, &format!("model_forest_{mode}.json"), format!("{json}\n").as_bytes())?;
        }
        ModelSpec::BasicNn | ModelSpec::OptimizedNn => {
            let mut net = match model {
                ModelSpec::BasicNn => build_basic_model::<f64>(ctx.seed),
                _ => build_optimized_model::<f64>(ctx.seed),
            };
            let config = options.train.clone();
            let epochs = config.epochs;
            let history = train_with(
                &mut net,
                &x_train,
                &y_train,
                &x_test,
                &y_test,
                &config,
                |r| {
                    eprintln!(
                        "epoch {:>3}/{epochs} lr {:.6} train_loss {:.4} train_acc {:.4} test_loss {:.4} test_acc {:.4}",
                        r.epoch, r.lr, r.train_loss, r.train_acc, r.test_loss, r.test_acc
                    );
                },
            )?;
            write_artifact(
                &ctx.out,
                &format!("history_{model}_{mode}.csv"),
                history.to_csv_string().as_bytes(),
            )?;
            let curves = render_learning_curves(&history)?;
            write_artifact(&ctx.out, &format!("curves_{model}.svg"), curves.to_svg_string().as_bytes())?;
            let checkpoint = Checkpoint { model: net, config };
            write_artifact(
                &ctx.out,
                &format!("checkpoint_{model}_{mode}.json"),
                format!("{}\n", checkpoint.to_json()?).as_bytes(),
            )?;
            if let Some(record) = history.epochs.last() {
                eprintln!("{model}: final test_acc {:.4}", record.test_acc);
            }
        }
    }
    Ok(())
}

pub fn cv(args: CvArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let input = require(args.input, ctx.cfg.input.clone(), "input")?;
    let mode = pick_parsed(args.mode, ctx.cfg.mode.as_deref(), FeatureMode::Absolute, "mode")?;
    let model = pick_parsed(args.model, ctx.cfg.model.as_deref(), ModelSpec::OptimizedNn, "model")?;
    let k = pick(args.k, ctx.cfg.k, 4);
    let (options, policy) = resolve_model_opts(&args.opts, &ctx.cfg, ctx.seed)?;
    let dataset = load_nonempty(&input)?;

    let (x_all, y_all) = build_feature_matrix(&dataset, mode)?;
    let (x, y) = apply_policy(x_all, y_all, policy)?;
    eprintln!("{k}-fold cross-validation of {model} on {mode} features (seed {})", ctx.seed);
    let report = cross_validate(model, mode, &x, &y, k, ctx.seed, &options)?;
    for (i, acc) in report.fold_accuracies.iter().enumerate() {
        eprintln!("fold {i}: accuracy {acc:.4}");
    }
    eprintln!("mean accuracy {:.4}", report.mean_accuracy);
    write_artifact(
        &ctx.out,
        &format!("cv_{model}_{mode}.json"),
        format!("{}\n", report.to_json()?).as_bytes(),
    )?;
    Ok(())
}

pub fn compare(args: CompareArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let input = require(args.input, ctx.cfg.input.clone(), "input")?;
    let k = pick(args.k, ctx.cfg.k, 4);
    let (options, policy) = resolve_model_opts(&args.opts, &ctx.cfg, ctx.seed)?;
    let dataset = load_nonempty(&input)?;

    let mut reports = Vec::new();
    for mode in [FeatureMode::Absolute, FeatureMode::Displacement] {
        let (x_all, y_all) = build_feature_matrix(&dataset, mode)?;
        let (x, y) = apply_policy(x_all, y_all, policy)?;
        for model in ModelSpec::ALL {
            eprintln!("cross-validating {model} on {mode} features ({k} folds, seed {})", ctx.seed);
            let report = cross_validate(model, mode, &x, &y, k, ctx.seed, &options)?;
            eprintln!("{model} / {mode}: mean accuracy {:.4}", report.mean_accuracy);
            write_artifact(
                &ctx.out,
                &format!("cv_{model}_{mode}.json"),
                format!("{}\n", report.to_json()?).as_bytes(),
            )?;
            reports.push(report);
        }
    }
    write_artifact(&ctx.out, "comparison.md", comparison_markdown(&reports).as_bytes())?;
    Ok(())
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let cfg = FileConfig::load(args.config.as_deref())?;
    let spec_path = args.spec.or(cfg.spec.clone());
    let seed_override = args.seed.or(cfg.seed);
    let mut spec = match &spec_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading spec {}", path.display()))?;
            visage_core::SynthSpec::from_json(&text)
                .with_context(|| format!("parsing spec {}", path.display()))?
        }
        None => synth::separable7::<f64>(seed_override.unwrap_or(0)),
    };
    if let Some(seed) = seed_override {
        spec.seed = seed;
    }
    let out = pick(args.out, cfg.out.clone(), PathBuf::from("synth.csv"));

    let dataset = synth::generate(&spec)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(&out, dataset.to_csv_string())
        .with_context(|| format!("writing {}", out.display()))?;
    eprintln!(
        "generated {} records ({} emotions, seed {}) into {}",
        dataset.len(),
        spec.emotions.len(),
        spec.seed,
        out.display()
    );
    if let Some(path) = args.write_spec {
        std::fs::write(&path, format!("{}\n", spec.to_json()))
            .with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
