//! Stratified k-fold cross-validation, accuracy and confusion metrics,
//! and the cross-model comparison report.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::dataset::EmotionLabel;
use crate::error::{Error, Result};
use crate::features::FeatureMode;
use crate::forest::{fit_forest, fit_tree, ForestParams, TreeParams};
use crate::matrix::Matrix;
use crate::neural::{build_basic_model, build_optimized_model, train, TrainConfig};
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::CLASS_COUNT;

/// A partition of sample indices into `k` folds, stratified by class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    /// Fold index in `0..k` for each sample, parallel to the label slice
    /// the assignment was built from.
    pub fold_of: Vec<usize>,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }
}

fn class_name(label: usize) -> String {
    EmotionLabel::from_index(label)
        .map(|e| e.as_str().to_string())
        .unwrap_or_else(|| format!("class {label}"))
}

/// Assign each sample to one of `k` folds: within each class, indices are
/// shuffled (seeded) and dealt round-robin, so per-class fold sizes differ
/// by at most one.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::invalid(format!(
            "cross-validation needs at least 2 folds, got {k}"
        )));
    }
    let max_label = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); max_label];
    for (i, &y) in labels.iter().enumerate() {
        per_class[y].push(i);
    }
    let mut rng = Rng::new(seed);
    let mut fold_of = vec![0usize; labels.len()];
    for (class, indices) in per_class.iter_mut().enumerate() {
        if indices.is_empty() {
            continue;
        }
        if indices.len() < k {
            return Err(Error::invalid(format!(
                "{} has {} samples, fewer than the {k} folds requested",
                class_name(class),
                indices.len()
            )));
        }
        rng.shuffle(indices);
        for (j, &sample) in indices.iter().enumerate() {
            fold_of[sample] = j % k;
        }
    }
    Ok(FoldAssignment { k, fold_of, seed })
}

/// Fraction of exact matches between predictions and truth.
pub fn accuracy(predictions: &[usize], truth: &[usize]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::invalid("accuracy of an empty prediction set"));
    }
    if predictions.len() != truth.len() {
        return Err(Error::invalid("predictions and truth differ in length"));
    }
    let correct = predictions
        .iter()
        .zip(truth)
        .filter(|(p, t)| p == t)
        .count();
    Ok(correct as f64 / truth.len() as f64)
}

/// Counts matrix with entry `(i, j)` = samples of true class `i` predicted
/// as class `j`.
pub fn confusion_matrix(
    predictions: &[usize],
    truth: &[usize],
    classes: usize,
) -> Result<Vec<Vec<u32>>> {
    if predictions.len() != truth.len() {
        return Err(Error::invalid("predictions and truth differ in length"));
    }
    let mut matrix = vec![vec![0u32; classes]; classes];
    for (&p, &t) in predictions.iter().zip(truth) {
        if p >= classes || t >= classes {
            return Err(Error::invalid(format!(
                "label out of range for a {classes}-class confusion matrix"
            )));
        }
        matrix[t][p] += 1;
    }
    Ok(matrix)
}

/// Which classifier a cross-validation run trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    Tree,
    Forest,
    BasicNn,
    OptimizedNn,
}

impl ModelSpec {
    pub const ALL: [ModelSpec; 4] = [
        ModelSpec::Tree,
        ModelSpec::Forest,
        ModelSpec::BasicNn,
        ModelSpec::OptimizedNn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelSpec::Tree => "tree",
            ModelSpec::Forest => "forest",
            ModelSpec::BasicNn => "basic_nn",
            ModelSpec::OptimizedNn => "optimized_nn",
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(ModelSpec::Tree),
            "forest" => Ok(ModelSpec::Forest),
            "basic_nn" => Ok(ModelSpec::BasicNn),
            "optimized_nn" => Ok(ModelSpec::OptimizedNn),
            other => Err(Error::invalid(format!(
                "unknown model '{other}' (expected tree, forest, basic_nn, or optimized_nn)"
            ))),
        }
    }
}

/// Hyperparameters for the models a CV run may train. `tree` configures
/// the standalone tree model; `forest` carries its own tree settings.
/// Seed fields inside are ignored: each fold reseeds with `seed + fold`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CvOptions {
    pub tree: TreeParams,
    pub forest: ForestParams,
    pub train: TrainConfig,
}

/// The outcome of one cross-validation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub model: ModelSpec,
    pub mode: FeatureMode,
    pub k: usize,
    pub seed: u64,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub confusion_matrices: Vec<Vec<Vec<u32>>>,
}

impl CvReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::invalid(e.to_string()))
    }
}

fn fit_and_predict<T: Scalar>(
    model: ModelSpec,
    x_train: &Matrix<T>,
    y_train: &[usize],
    x_test: &Matrix<T>,
    y_test: &[usize],
    fold_seed: u64,
    options: &CvOptions,
) -> Result<Vec<usize>> {
    match model {
        ModelSpec::Tree => {
            let params = TreeParams {
                rng_seed: fold_seed,
                ..options.tree.clone()
            };
            let tree = fit_tree(x_train, y_train, &params, CLASS_COUNT)?;
            Ok(tree.predict_batch(x_test))
        }
        ModelSpec::Forest => {
            let params = ForestParams {
                rng_seed: fold_seed,
                ..options.forest.clone()
            };
            let forest = fit_forest(x_train, y_train, &params, CLASS_COUNT)?;
            Ok(forest.predict_batch(x_test))
        }
        ModelSpec::BasicNn | ModelSpec::OptimizedNn => {
            if x_train.cols() != crate::FEATURE_DIM {
                return Err(Error::invalid(format!(
                    "neural models expect {} features, got {}",
                    crate::FEATURE_DIM,
                    x_train.cols()
                )));
            }
            let mut net = match model {
                ModelSpec::BasicNn => build_basic_model::<T>(fold_seed),
                _ => build_optimized_model::<T>(fold_seed),
            };
            let config = TrainConfig {
                seed: fold_seed,
                ..options.train.clone()
            };
            train(&mut net, x_train, y_train, x_test, y_test, &config)?;
            net.predict_batch(x_test)
        }
    }
}

/// Run stratified k-fold cross-validation: for each fold, train the chosen
/// model on the other k−1 folds from a fresh `seed + fold` initialization
/// and score the held-out fold in eval mode. `mode` is recorded in the
/// report; `x` must already contain features of that mode.
pub fn cross_validate<T: Scalar>(
    model: ModelSpec,
    mode: FeatureMode,
    x: &Matrix<T>,
    y: &[usize],
    k: usize,
    seed: u64,
    options: &CvOptions,
) -> Result<CvReport> {
    if x.rows() != y.len() {
        return Err(Error::invalid("one label per sample required"));
    }
    let assignment = stratified_kfold(y, k, seed)?;
    let mut fold_accuracies = Vec::with_capacity(k);
    let mut confusion_matrices = Vec::with_capacity(k);
    for fold in 0..k {
        let train_idx = assignment.train_indices(fold);
        let test_idx = assignment.test_indices(fold);
        let x_train = x.select_rows(&train_idx);
        let y_train: Vec<usize> = train_idx.iter().map(|&i| y[i]).collect();
        let x_test = x.select_rows(&test_idx);
        let y_test: Vec<usize> = test_idx.iter().map(|&i| y[i]).collect();
        let predictions = fit_and_predict(
            model,
            &x_train,
            &y_train,
            &x_test,
            &y_test,
            seed + fold as u64,
            options,
        )?;
        fold_accuracies.push(accuracy(&predictions, &y_test)?);
        confusion_matrices.push(confusion_matrix(&predictions, &y_test, CLASS_COUNT)?);
    }
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / k as f64;
    Ok(CvReport {
        model,
        mode,
        k,
        seed,
        fold_accuracies,
        mean_accuracy,
        confusion_matrices,
    })
}

/// Render a markdown table of mean accuracies, one row per model and one
/// column per feature mode. Cells for combinations absent from `reports`
/// show a dash.
pub fn comparison_markdown(reports: &[CvReport]) -> String {
    let mut out = String::from("# Model comparison\n\n");
    if let Some(first) = reports.first() {
        out.push_str(&format!(
            "Mean accuracy over stratified {}-fold cross-validation (seed {}).\n\n",
            first.k, first.seed
        ));
    }
    let modes = [FeatureMode::Absolute, FeatureMode::Displacement];
    out.push_str("| model | absolute | displacement |\n");
    out.push_str("| --- | --- | --- |\n");
    for model in ModelSpec::ALL {
        out.push_str(&format!("| {model} |"));
        for mode in modes {
            let cell = reports
                .iter()
                .find(|r| r.model == model && r.mode == mode)
                .map_or_else(|| " — ".to_string(), |r| format!(" {:.4} ", r.mean_accuracy));
            out.push_str(&cell);
            out.push('|');
        }
        out.push('\n');
    }
    out
}
