//! Minibatch training driver: seeded shuffling, Adam updates on weighted
//! softmax cross-entropy, step-decayed learning rate, and per-epoch
//! metrics over both splits.

use serde::{Deserialize, Serialize};
use std::path::Path;

use super::adam::{lr_schedule, AdamState};
use super::loss::softmax_cross_entropy;
use super::model::MlpModel;
use super::Mode;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Full passes over the training split.
    pub epochs: usize,
    /// Minibatch size; the final batch of an epoch may be smaller.
    pub batch_size: usize,
    /// Seeds both the per-epoch shuffles and dropout masks.
    pub seed: u64,
    /// Weight each sample's loss by the inverse frequency of its class.
    pub class_weighting: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            batch_size: 32,
            seed: 0,
            class_weighting: false,
        }
    }
}

/// Metrics recorded after one epoch. Losses and accuracies come from a
/// deterministic eval-mode pass over each full split, with the loss
/// unweighted so the numbers stay comparable across weighting settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based epoch number.
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_loss: f64,
    pub test_acc: f64,
    /// Learning rate the epoch's updates used.
    pub lr: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    pub epochs: Vec<EpochRecord>,
}

impl TrainingHistory {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("epoch,train_loss,train_acc,test_loss,test_acc,lr\n");
        for r in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.epoch, r.train_loss, r.train_acc, r.test_loss, r.test_acc, r.lr
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn final_test_acc(&self) -> Option<f64> {
        self.epochs.last().map(|r| r.test_acc)
    }
}

/// A trained model together with the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Checkpoint<T> {
    pub model: MlpModel<T>,
    pub config: TrainConfig,
}

impl<T: Scalar> Checkpoint<T> {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::invalid(e.to_string()))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::invalid(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Checkpoint::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Inverse-frequency class weights over the training labels:
/// `w_c = n / (classes · count_c)`, zero for classes absent from the
/// split. Balanced data gets uniform weights of 1.
pub fn inverse_frequency_weights<T: Scalar>(labels: &[usize], classes: usize) -> Vec<T> {
    let mut counts = vec![0usize; classes];
    for &y in labels {
        counts[y] += 1;
    }
    let n = labels.len() as f64;
    counts
        .iter()
        .map(|&c| {
            if c == 0 {
                T::zero()
            } else {
                T::c(n / (classes as f64 * c as f64))
            }
        })
        .collect()
}

fn argmax_row<T: Scalar>(row: &[T]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Deterministic eval-mode pass: (unweighted mean cross-entropy, accuracy).
fn evaluate_split<T: Scalar>(
    model: &mut MlpModel<T>,
    x: &Matrix<T>,
    y: &[usize],
) -> Result<(f64, f64)> {
    let logits = model.forward(x, Mode::Eval, &mut Rng::new(0))?;
    let (loss, _) = softmax_cross_entropy(&logits, y, None);
    let correct = (0..logits.rows())
        .filter(|&b| argmax_row(logits.row(b)) == y[b])
        .count();
    Ok((loss.to_f64_lossy(), correct as f64 / y.len() as f64))
}

fn check_inputs<T: Scalar>(
    model: &MlpModel<T>,
    x_train: &Matrix<T>,
    y_train: &[usize],
    x_test: &Matrix<T>,
    y_test: &[usize],
    config: &TrainConfig,
) -> Result<()> {
    if x_train.rows() == 0 {
        return Err(Error::invalid("training split is empty"));
    }
    if x_test.rows() == 0 {
        return Err(Error::invalid("test split is empty"));
    }
    if x_train.rows() != y_train.len() || x_test.rows() != y_test.len() {
        return Err(Error::invalid("one label per sample required"));
    }
    for &y in y_train.iter().chain(y_test) {
        if y >= model.output_dim {
            return Err(Error::invalid(format!(
                "label {y} out of range for a {}-class model",
                model.output_dim
            )));
        }
    }
    if config.epochs == 0 {
        return Err(Error::invalid("epochs must be at least 1"));
    }
    if config.batch_size == 0 {
        return Err(Error::invalid("batch size must be at least 1"));
    }
    if config.batch_size > x_train.rows() {
        return Err(Error::invalid(format!(
            "batch size {} exceeds the {} training samples",
            config.batch_size,
            x_train.rows()
        )));
    }
    if model.has_batchnorm() {
        let trailing = x_train.rows() % config.batch_size;
        if config.batch_size == 1 || trailing == 1 {
            return Err(Error::invalid(format!(
                "batch size {} leaves a batch of 1 training sample, which batch \
                 normalization cannot standardize; choose a different batch size",
                config.batch_size
            )));
        }
    }
    Ok(())
}

/// Train in place, returning the per-epoch history.
pub fn train<T: Scalar>(
    model: &mut MlpModel<T>,
    x_train: &Matrix<T>,
    y_train: &[usize],
    x_test: &Matrix<T>,
    y_test: &[usize],
    config: &TrainConfig,
) -> Result<TrainingHistory> {
    train_with(model, x_train, y_train, x_test, y_test, config, |_| {})
}

/// [`train`] with a per-epoch callback, invoked right after each epoch's
/// record is computed.
pub fn train_with<T: Scalar>(
    model: &mut MlpModel<T>,
    x_train: &Matrix<T>,
    y_train: &[usize],
    x_test: &Matrix<T>,
    y_test: &[usize],
    config: &TrainConfig,
    mut progress: impl FnMut(&EpochRecord),
) -> Result<TrainingHistory> {
    check_inputs(model, x_train, y_train, x_test, y_test, config)?;

    let weights = config
        .class_weighting
        .then(|| inverse_frequency_weights::<T>(y_train, model.output_dim));
    let mut rng = Rng::new(config.seed);
    let mut optimizer = AdamState::new();
    let mut order: Vec<usize> = (0..x_train.rows()).collect();
    let mut history = TrainingHistory::default();

    for epoch in 0..config.epochs {
        let lr = lr_schedule(epoch);
        rng.shuffle(&mut order);
        for batch in order.chunks(config.batch_size) {
            let xb = x_train.select_rows(batch);
            let yb: Vec<usize> = batch.iter().map(|&i| y_train[i]).collect();
            let logits = model.forward(&xb, Mode::Train, &mut rng)?;
            let (_, d_logits) = softmax_cross_entropy(&logits, &yb, weights.as_deref());
            model.backward(&d_logits);
            optimizer.step(model, lr);
        }

        let (train_loss, train_acc) = evaluate_split(model, x_train, y_train)?;
        let (test_loss, test_acc) = evaluate_split(model, x_test, y_test)?;
        let record = EpochRecord {
            epoch: epoch + 1,
            train_loss,
            train_acc,
            test_loss,
            test_acc,
            lr,
        };
        progress(&record);
        history.epochs.push(record);
    }
    Ok(history)
}
