//! Model assembly: declarative layer specs, seeded initialization, and
//! the two reference architectures (a plain ReLU/dropout stack and a
//! wider batchnorm/GELU/residual stack).

use serde::{Deserialize, Serialize};

use super::layer::{BatchNorm, Dense, Dropout, Gelu, Layer, Relu, ResidualBlock};
use super::Mode;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Declarative description of one layer. Widths are explicit where a
/// layer has parameters so a spec list is self-documenting; a residual
/// block's skip projection is derived (block input width → main path
/// output width) rather than spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerSpec {
    Dense { inputs: usize, outputs: usize },
    Relu,
    Gelu,
    Batchnorm { width: usize },
    Dropout { rate: f64 },
    ResidualBlock { main: Vec<LayerSpec> },
}

/// A feed-forward network: an ordered layer stack plus the dimensions it
/// maps between and the seed its parameters were drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MlpModel<T> {
    pub layers: Vec<Layer<T>>,
    pub input_dim: usize,
    pub output_dim: usize,
    pub seed: u64,
}

fn build_layers<T: Scalar>(
    width_in: usize,
    specs: &[LayerSpec],
    rng: &mut Rng,
) -> Result<(Vec<Layer<T>>, usize)> {
    let mut layers = Vec::with_capacity(specs.len());
    let mut width = width_in;
    for spec in specs {
        let layer = match spec {
            LayerSpec::Dense { inputs, outputs } => {
                if *inputs != width {
                    return Err(Error::invalid(format!(
                        "dense layer expects {inputs} inputs but the stack is {width} wide here"
                    )));
                }
                width = *outputs;
                Layer::Dense(Dense::new(*inputs, *outputs, rng))
            }
            LayerSpec::Relu => Layer::Relu(Relu::default()),
            LayerSpec::Gelu => Layer::Gelu(Gelu::default()),
            LayerSpec::Batchnorm { width: w } => {
                if *w != width {
                    return Err(Error::invalid(format!(
                        "batchnorm width {w} does not match the stack width {width}"
                    )));
                }
                Layer::Batchnorm(BatchNorm::new(*w))
            }
            LayerSpec::Dropout { rate } => Layer::Dropout(Dropout::new(*rate)),
            LayerSpec::ResidualBlock { main } => {
                if main.is_empty() {
                    return Err(Error::invalid("residual block needs a main path"));
                }
                // Parameter draw order inside a block: main path layers in
                // order, then the skip projection.
                let (main_layers, main_out) = build_layers(width, main, rng)?;
                let skip = Dense::new(width, main_out, rng);
                width = main_out;
                Layer::ResidualBlock(ResidualBlock {
                    main: main_layers,
                    skip,
                })
            }
        };
        layers.push(layer);
    }
    Ok((layers, width))
}

impl<T: Scalar> MlpModel<T> {
    /// Build a model from specs, drawing Glorot-uniform dense weights from
    /// a fresh generator seeded with `seed`. The same seed and specs give
    /// a bit-identical model.
    pub fn from_specs(input_dim: usize, specs: &[LayerSpec], seed: u64) -> Result<Self> {
        let mut rng = Rng::new(seed);
        let (layers, output_dim) = build_layers(input_dim, specs, &mut rng)?;
        Ok(MlpModel {
            layers,
            input_dim,
            output_dim,
            seed,
        })
    }

    /// Run the stack in order. Eval mode consumes no randomness, so any
    /// generator may be passed for pure inference.
    pub fn forward(&mut self, x: &Matrix<T>, mode: Mode, rng: &mut Rng) -> Result<Matrix<T>> {
        assert_eq!(x.cols(), self.input_dim, "input width mismatch");
        let mut out = x.clone();
        for layer in &mut self.layers {
            out = layer.forward(&out, mode, rng)?;
        }
        Ok(out)
    }

    /// Backpropagate from the loss gradient at the logits, leaving fresh
    /// parameter gradients in every layer; returns the input gradient.
    pub fn backward(&mut self, d_logits: &Matrix<T>) -> Matrix<T> {
        let mut d = d_logits.clone();
        for layer in self.layers.iter_mut().rev() {
            d = layer.backward(&d);
        }
        d
    }

    /// Predicted class per row: the argmax of the eval-mode logits, lowest
    /// index on ties.
    pub fn predict_batch(&mut self, x: &Matrix<T>) -> Result<Vec<usize>> {
        let logits = self.forward(x, Mode::Eval, &mut Rng::new(0))?;
        Ok((0..logits.rows())
            .map(|b| {
                let row = logits.row(b);
                let mut best = 0;
                for (j, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = j;
                    }
                }
                best
            })
            .collect())
    }

    pub fn visit_params_and_grads(&mut self, f: &mut dyn FnMut(&mut [T], &[T])) {
        for layer in &mut self.layers {
            layer.visit_params_and_grads(f);
        }
    }

    pub fn visit_params_mut(&mut self, f: &mut dyn FnMut(&mut [T])) {
        for layer in &mut self.layers {
            layer.visit_params_mut(f);
        }
    }

    pub fn param_count(&self) -> usize {
        fn count<T: Scalar>(layer: &Layer<T>) -> usize {
            match layer {
                Layer::Dense(l) => l.w.rows() * l.w.cols() + l.b.len(),
                Layer::Batchnorm(l) => l.gamma.len() + l.beta.len(),
                Layer::ResidualBlock(l) => {
                    l.main.iter().map(count).sum::<usize>()
                        + l.skip.w.rows() * l.skip.w.cols()
                        + l.skip.b.len()
                }
                Layer::Relu(_) | Layer::Gelu(_) | Layer::Dropout(_) => 0,
            }
        }
        self.layers.iter().map(count).sum()
    }

    pub fn has_batchnorm(&self) -> bool {
        self.layers.iter().any(Layer::has_batchnorm)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self).map_err(|e| Error::invalid(e.to_string()))?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::invalid(e.to_string()))
    }
}

/// 136 → 256 → 128 → 7 with ReLU activations and heavy dropout.
pub fn basic_specs() -> Vec<LayerSpec> {
    vec![
        LayerSpec::Dense {
            inputs: 136,
            outputs: 256,
        },
        LayerSpec::Relu,
        LayerSpec::Dropout { rate: 0.5 },
        LayerSpec::Dense {
            inputs: 256,
            outputs: 128,
        },
        LayerSpec::Relu,
        LayerSpec::Dropout { rate: 0.5 },
        LayerSpec::Dense {
            inputs: 128,
            outputs: 7,
        },
    ]
}

/// 136 → 512 → 256 → 128 → 7 with batch normalization, GELU activations,
/// lighter dropout, and one projected residual block at the 512→256 step.
pub fn optimized_specs() -> Vec<LayerSpec> {
    vec![
        LayerSpec::Dense {
            inputs: 136,
            outputs: 512,
        },
        LayerSpec::Batchnorm { width: 512 },
        LayerSpec::Gelu,
        LayerSpec::Dropout { rate: 0.3 },
        LayerSpec::ResidualBlock {
            main: vec![
                LayerSpec::Dense {
                    inputs: 512,
                    outputs: 256,
                },
                LayerSpec::Batchnorm { width: 256 },
                LayerSpec::Gelu,
            ],
        },
        LayerSpec::Dropout { rate: 0.3 },
        LayerSpec::Dense {
            inputs: 256,
            outputs: 128,
        },
        LayerSpec::Batchnorm { width: 128 },
        LayerSpec::Gelu,
        LayerSpec::Dropout { rate: 0.3 },
        LayerSpec::Dense {
            inputs: 128,
            outputs: 7,
        },
    ]
}

pub fn build_basic_model<T: Scalar>(seed: u64) -> MlpModel<T> {
    MlpModel::from_specs(crate::FEATURE_DIM, &basic_specs(), seed)
        .expect("reference architecture is well-formed")
}

pub fn build_optimized_model<T: Scalar>(seed: u64) -> MlpModel<T> {
    MlpModel::from_specs(crate::FEATURE_DIM, &optimized_specs(), seed)
        .expect("reference architecture is well-formed")
}
