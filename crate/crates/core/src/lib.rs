//! Facial-landmark emotion analysis.
//!
//! The crate takes sequences of 68-point facial landmark frames, curates
//! them into (neutral, peak) pairs per subject and emotion, turns them into
//! normalized coordinate features, and offers three consumers of those
//! features: descriptive statistics with boxplot-style outlier zoning and
//! SVG charts, a from-scratch random forest, and a from-scratch multilayer
//! perceptron with a modern training loop. A synthetic-data generator
//! produces datasets with known ground truth for end-to-end checks.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the type
//! aliases at the crate root fix `f64`, which is what the CLI uses.

pub mod dataset;
pub mod error;
pub mod evaluate;
pub mod features;
pub mod forest;
pub mod matrix;
pub mod neural;
pub mod plots;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use rng::Rng;
pub use scalar::Scalar;

/// Number of landmarks per frame.
pub const LANDMARK_COUNT: usize = 68;

/// Feature vector width: x and y per landmark.
pub const FEATURE_DIM: usize = 2 * LANDMARK_COUNT;

/// Number of emotion classes.
pub const CLASS_COUNT: usize = 7;

pub type LandmarkFrame = dataset::LandmarkFrame<f64>;
pub type SubjectRecord = dataset::SubjectRecord<f64>;
pub type CuratedDataset = dataset::CuratedDataset<f64>;
pub type Matrix = matrix::Matrix<f64>;
pub type BoxplotSummary = stats::BoxplotSummary<f64>;
pub type DecisionTree = forest::DecisionTree<f64>;
pub type RandomForest = forest::RandomForest<f64>;
pub type MlpModel = neural::MlpModel<f64>;
pub type TrainConfig = neural::TrainConfig;
pub type SynthSpec = synth::SynthSpec<f64>;
