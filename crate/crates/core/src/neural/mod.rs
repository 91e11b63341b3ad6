//! A small dense neural-network engine: layers with explicit forward and
//! backward passes, softmax cross-entropy, Adam, and a step-decay learning
//! rate schedule. Everything is written out long-hand — no autograd — so
//! each layer owns its parameter tensors, its gradient buffers, and the
//! activation caches its backward pass needs.
//!
//! Two ready-made classifiers are provided: a basic ReLU network
//! (136→256→128→7 with 50% dropout) and a wider GELU network with batch
//! normalization and a projected residual connection
//! (136→512→256(+skip)→128→7 with 30% dropout). The model emits logits;
//! softmax lives inside the loss for numerical stability.

mod adam;
mod layer;
mod loss;
mod model;
mod train;

pub use adam::{adam_step, lr_schedule, AdamState, Moments, BASE_LR, BETA1, BETA2, EPSILON};
pub use layer::{gelu, gelu_derivative, BatchNorm, Dense, Dropout, Gelu, Layer, Relu, ResidualBlock};
pub use loss::{softmax_cross_entropy, softmax_rows};
pub use model::{
    basic_specs, build_basic_model, build_optimized_model, optimized_specs, LayerSpec, MlpModel,
};
pub use train::{train, train_with, Checkpoint, EpochRecord, TrainConfig, TrainingHistory};

/// Forward-pass mode: training enables dropout and batch statistics;
/// evaluation uses running statistics and disables dropout, making the
/// pass deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}
