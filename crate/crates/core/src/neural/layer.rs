//! Layers. Each one caches whatever its backward pass needs during
//! `forward` and stores fresh parameter gradients during `backward`
//! (overwriting the previous batch's). Caches and gradients are runtime
//! state and are skipped by serialization; a deserialized layer is ready
//! for a new forward pass.

use serde::{Deserialize, Serialize};

use super::Mode;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Tanh-approximation GELU: `0.5·x·(1 + tanh(√(2/π)·(x + 0.044715·x³)))`.
pub fn gelu<T: Scalar>(x: T) -> T {
    let c = T::c((2.0 / std::f64::consts::PI).sqrt());
    let u = c * (x + T::c(0.044715) * x * x * x);
    T::c(0.5) * x * (T::one() + u.tanh())
}

/// Analytic derivative of the tanh-approximation GELU:
/// `0.5·(1 + tanh u) + 0.5·x·sech²u·√(2/π)·(1 + 0.134145·x²)`.
pub fn gelu_derivative<T: Scalar>(x: T) -> T {
    let c = T::c((2.0 / std::f64::consts::PI).sqrt());
    let u = c * (x + T::c(0.044715) * x * x * x);
    let t = u.tanh();
    let sech2 = T::one() - t * t;
    let du = c * (T::one() + T::c(3.0 * 0.044715) * x * x);
    T::c(0.5) * (T::one() + t) + T::c(0.5) * x * sech2 * du
}

/// Fully connected layer; weights are out×in, output is `x·Wᵀ + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Dense<T> {
    pub w: Matrix<T>,
    pub b: Vec<T>,
    #[serde(skip)]
    input: Option<Matrix<T>>,
    #[serde(skip)]
    pub dw: Option<Matrix<T>>,
    #[serde(skip)]
    pub db: Option<Vec<T>>,
}

impl<T: Scalar> Dense<T> {
    /// Glorot-uniform init: weights in ±√(6/(fan_in+fan_out)), row-major
    /// draw order, biases zero.
    pub fn new(inputs: usize, outputs: usize, rng: &mut Rng) -> Self {
        let bound = (6.0 / (inputs + outputs) as f64).sqrt();
        let mut w = Matrix::zeros(outputs, inputs);
        for v in w.data_mut() {
            *v = T::c((2.0 * rng.next_f64() - 1.0) * bound);
        }
        Dense {
            w,
            b: vec![T::zero(); outputs],
            input: None,
            dw: None,
            db: None,
        }
    }

    pub fn forward(&mut self, x: &Matrix<T>) -> Matrix<T> {
        let (batch, inputs) = (x.rows(), x.cols());
        let outputs = self.w.rows();
        assert_eq!(inputs, self.w.cols(), "dense input width mismatch");
        let mut y = Matrix::zeros(batch, outputs);
        for b in 0..batch {
            let xr = x.row(b);
            let yr = y.row_mut(b);
            for o in 0..outputs {
                let wr = self.w.row(o);
                let mut acc = self.b[o];
                for i in 0..inputs {
                    acc += wr[i] * xr[i];
                }
                yr[o] = acc;
            }
        }
        self.input = Some(x.clone());
        y
    }

    pub fn backward(&mut self, d_out: &Matrix<T>) -> Matrix<T> {
        let x = self.input.as_ref().expect("forward before backward");
        let (batch, inputs) = (x.rows(), x.cols());
        let outputs = self.w.rows();
        let mut dw = Matrix::zeros(outputs, inputs);
        let mut db = vec![T::zero(); outputs];
        let mut dx = Matrix::zeros(batch, inputs);
        for b in 0..batch {
            let xr = x.row(b);
            let dr = d_out.row(b);
            let dxr = dx.row_mut(b);
            for o in 0..outputs {
                let g = dr[o];
                db[o] += g;
                let dwr = dw.row_mut(o);
                let wr = self.w.row(o);
                for i in 0..inputs {
                    dwr[i] += g * xr[i];
                    dxr[i] += g * wr[i];
                }
            }
        }
        self.dw = Some(dw);
        self.db = Some(db);
        dx
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Relu<T> {
    #[serde(skip)]
    input: Option<Matrix<T>>,
}

impl<T: Scalar> Relu<T> {
    pub fn forward(&mut self, x: &Matrix<T>) -> Matrix<T> {
        let mut y = x.clone();
        for v in y.data_mut() {
            if *v < T::zero() {
                *v = T::zero();
            }
        }
        self.input = Some(x.clone());
        y
    }

    pub fn backward(&mut self, d_out: &Matrix<T>) -> Matrix<T> {
        let x = self.input.as_ref().expect("forward before backward");
        let mut dx = d_out.clone();
        for (d, &v) in dx.data_mut().iter_mut().zip(x.data()) {
            if v <= T::zero() {
                *d = T::zero();
            }
        }
        dx
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Gelu<T> {
    #[serde(skip)]
    input: Option<Matrix<T>>,
}

impl<T: Scalar> Gelu<T> {
    pub fn forward(&mut self, x: &Matrix<T>) -> Matrix<T> {
        let mut y = x.clone();
        for v in y.data_mut() {
            *v = gelu(*v);
        }
        self.input = Some(x.clone());
        y
    }

    pub fn backward(&mut self, d_out: &Matrix<T>) -> Matrix<T> {
        let x = self.input.as_ref().expect("forward before backward");
        let mut dx = d_out.clone();
        for (d, &v) in dx.data_mut().iter_mut().zip(x.data()) {
            *d = *d * gelu_derivative(v);
        }
        dx
    }
}

/// What the batchnorm backward pass needs from the matching forward pass.
#[derive(Debug, Clone, PartialEq)]
struct BnCache<T> {
    x_hat: Matrix<T>,
    inv_std: Vec<T>,
    mode: Mode,
}

/// Batch normalization over feature columns, ε = 1e-5, running-stat
/// momentum 0.1, biased batch variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BatchNorm<T> {
    pub gamma: Vec<T>,
    pub beta: Vec<T>,
    pub running_mean: Vec<T>,
    pub running_var: Vec<T>,
    #[serde(skip)]
    cache: Option<BnCache<T>>,
    #[serde(skip)]
    pub dgamma: Option<Vec<T>>,
    #[serde(skip)]
    pub dbeta: Option<Vec<T>>,
}

pub const BN_EPSILON: f64 = 1e-5;
pub const BN_MOMENTUM: f64 = 0.1;

impl<T: Scalar> BatchNorm<T> {
    pub fn new(width: usize) -> Self {
        BatchNorm {
            gamma: vec![T::one(); width],
            beta: vec![T::zero(); width],
            running_mean: vec![T::zero(); width],
            running_var: vec![T::one(); width],
            cache: None,
            dgamma: None,
            dbeta: None,
        }
    }

    pub fn forward(&mut self, x: &Matrix<T>, mode: Mode) -> Result<Matrix<T>> {
        let (batch, width) = (x.rows(), x.cols());
        assert_eq!(width, self.gamma.len(), "batchnorm width mismatch");
        if mode == Mode::Train && batch < 2 {
            return Err(Error::invalid(format!(
                "batch normalization needs at least 2 samples per training batch, got {batch}"
            )));
        }
        let eps = T::c(BN_EPSILON);
        let (mean, inv_std) = match mode {
            Mode::Train => {
                let bn = T::c(batch as f64);
                let mut mean = vec![T::zero(); width];
                for b in 0..batch {
                    for (m, &v) in mean.iter_mut().zip(x.row(b)) {
                        *m += v;
                    }
                }
                for m in &mut mean {
                    *m /= bn;
                }
                let mut var = vec![T::zero(); width];
                for b in 0..batch {
                    for j in 0..width {
                        let d = x.get(b, j) - mean[j];
                        var[j] += d * d;
                    }
                }
                for v in &mut var {
                    *v /= bn;
                }
                let momentum = T::c(BN_MOMENTUM);
                let keep = T::one() - momentum;
                for j in 0..width {
                    self.running_mean[j] = keep * self.running_mean[j] + momentum * mean[j];
                    self.running_var[j] = keep * self.running_var[j] + momentum * var[j];
                }
                let inv_std: Vec<T> =
                    var.iter().map(|&v| T::one() / (v + eps).sqrt()).collect();
                (mean, inv_std)
            }
            Mode::Eval => (
                self.running_mean.clone(),
                self.running_var
                    .iter()
                    .map(|&v| T::one() / (v + eps).sqrt())
                    .collect(),
            ),
        };

        let mut x_hat = Matrix::zeros(batch, width);
        let mut y = Matrix::zeros(batch, width);
        for b in 0..batch {
            for j in 0..width {
                let xh = (x.get(b, j) - mean[j]) * inv_std[j];
                x_hat.set(b, j, xh);
                y.set(b, j, self.gamma[j] * xh + self.beta[j]);
            }
        }
        self.cache = Some(BnCache {
            x_hat,
            inv_std,
            mode,
        });
        Ok(y)
    }

    pub fn backward(&mut self, d_out: &Matrix<T>) -> Matrix<T> {
        let cache = self.cache.as_ref().expect("forward before backward");
        let (batch, width) = (d_out.rows(), d_out.cols());
        let bn = T::c(batch as f64);

        let mut dgamma = vec![T::zero(); width];
        let mut dbeta = vec![T::zero(); width];
        for b in 0..batch {
            for j in 0..width {
                let g = d_out.get(b, j);
                dgamma[j] += g * cache.x_hat.get(b, j);
                dbeta[j] += g;
            }
        }

        let mut dx = Matrix::zeros(batch, width);
        match cache.mode {
            Mode::Train => {
                // Standard batchnorm backward with biased batch variance:
                // dx = γ·inv_std/B · (B·dy − Σdy − x̂·Σ(dy·x̂))
                for b in 0..batch {
                    for j in 0..width {
                        let term = bn * d_out.get(b, j) - dbeta[j] - cache.x_hat.get(b, j) * dgamma[j];
                        dx.set(b, j, self.gamma[j] * cache.inv_std[j] * term / bn);
                    }
                }
            }
            Mode::Eval => {
                // Running stats are constants in eval mode.
                for b in 0..batch {
                    for j in 0..width {
                        dx.set(b, j, d_out.get(b, j) * self.gamma[j] * cache.inv_std[j]);
                    }
                }
            }
        }
        self.dgamma = Some(dgamma);
        self.dbeta = Some(dbeta);
        dx
    }
}

/// Inverted dropout: surviving activations are scaled by 1/(1−rate) at
/// train time so eval-mode expectations need no adjustment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Dropout<T> {
    pub rate: f64,
    #[serde(skip)]
    mask: Option<Matrix<T>>,
}

impl<T: Scalar> Dropout<T> {
    pub fn new(rate: f64) -> Self {
        assert!((0.0..1.0).contains(&rate), "dropout rate must be in [0, 1)");
        Dropout { rate, mask: None }
    }

    /// Train mode draws one uniform per element in row-major order; an
    /// element survives when its draw is ≥ rate.
    pub fn forward(&mut self, x: &Matrix<T>, mode: Mode, rng: &mut Rng) -> Matrix<T> {
        match mode {
            Mode::Eval => {
                self.mask = None;
                x.clone()
            }
            Mode::Train => {
                let scale = T::c(1.0 / (1.0 - self.rate));
                let mut mask = Matrix::zeros(x.rows(), x.cols());
                for m in mask.data_mut() {
                    *m = if rng.next_f64() >= self.rate {
                        scale
                    } else {
                        T::zero()
                    };
                }
                let mut y = x.clone();
                for (v, &m) in y.data_mut().iter_mut().zip(mask.data()) {
                    *v = *v * m;
                }
                self.mask = Some(mask);
                y
            }
        }
    }

    pub fn backward(&mut self, d_out: &Matrix<T>) -> Matrix<T> {
        match &self.mask {
            None => d_out.clone(),
            Some(mask) => {
                let mut dx = d_out.clone();
                for (d, &m) in dx.data_mut().iter_mut().zip(mask.data()) {
                    *d = *d * m;
                }
                dx
            }
        }
    }
}

/// Residual block with a learned skip projection: output = main(x) + P·x.
/// The skip path makes the sum well-typed when the main path changes
/// width. The main path consumes RNG draws first (in layer order); the
/// skip projection draws nothing at forward time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ResidualBlock<T> {
    pub main: Vec<Layer<T>>,
    pub skip: Dense<T>,
}

impl<T: Scalar> ResidualBlock<T> {
    pub fn forward(&mut self, x: &Matrix<T>, mode: Mode, rng: &mut Rng) -> Result<Matrix<T>> {
        let mut main_out = x.clone();
        for layer in &mut self.main {
            main_out = layer.forward(&main_out, mode, rng)?;
        }
        let skip_out = self.skip.forward(x);
        assert_eq!(
            (main_out.rows(), main_out.cols()),
            (skip_out.rows(), skip_out.cols()),
            "residual paths must agree in shape"
        );
        let mut y = main_out;
        for (v, &s) in y.data_mut().iter_mut().zip(skip_out.data()) {
            *v += s;
        }
        Ok(y)
    }

    pub fn backward(&mut self, d_out: &Matrix<T>) -> Matrix<T> {
        let mut d_main = d_out.clone();
        for layer in self.main.iter_mut().rev() {
            d_main = layer.backward(&d_main);
        }
        let d_skip = self.skip.backward(d_out);
        let mut dx = d_main;
        for (v, &s) in dx.data_mut().iter_mut().zip(d_skip.data()) {
            *v += s;
        }
        dx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound = "T: Scalar")]
pub enum Layer<T> {
    Dense(Dense<T>),
    Relu(Relu<T>),
    Gelu(Gelu<T>),
    Batchnorm(BatchNorm<T>),
    Dropout(Dropout<T>),
    ResidualBlock(ResidualBlock<T>),
}

impl<T: Scalar> Layer<T> {
    pub fn forward(&mut self, x: &Matrix<T>, mode: Mode, rng: &mut Rng) -> Result<Matrix<T>> {
        Ok(match self {
            Layer::Dense(l) => l.forward(x),
            Layer::Relu(l) => l.forward(x),
            Layer::Gelu(l) => l.forward(x),
            Layer::Batchnorm(l) => l.forward(x, mode)?,
            Layer::Dropout(l) => l.forward(x, mode, rng),
            Layer::ResidualBlock(l) => l.forward(x, mode, rng)?,
        })
    }

    pub fn backward(&mut self, d_out: &Matrix<T>) -> Matrix<T> {
        match self {
            Layer::Dense(l) => l.backward(d_out),
            Layer::Relu(l) => l.backward(d_out),
            Layer::Gelu(l) => l.backward(d_out),
            Layer::Batchnorm(l) => l.backward(d_out),
            Layer::Dropout(l) => l.backward(d_out),
            Layer::ResidualBlock(l) => l.backward(d_out),
        }
    }

    /// Walk (parameter, gradient) tensor pairs in the documented order:
    /// dense weights then bias; batchnorm gamma then beta; residual main
    /// layers in order, then the skip projection. Running statistics are
    /// not parameters. Panics if called before a backward pass.
    pub fn visit_params_and_grads(&mut self, f: &mut dyn FnMut(&mut [T], &[T])) {
        match self {
            Layer::Dense(l) => {
                let dw = l.dw.as_ref().expect("gradients computed");
                f(l.w.data_mut(), dw.data());
                let db = l.db.as_ref().expect("gradients computed");
                f(&mut l.b, db);
            }
            Layer::Batchnorm(l) => {
                let dg = l.dgamma.as_ref().expect("gradients computed");
                f(&mut l.gamma, dg);
                let db = l.dbeta.as_ref().expect("gradients computed");
                f(&mut l.beta, db);
            }
            Layer::ResidualBlock(l) => {
                for layer in &mut l.main {
                    layer.visit_params_and_grads(f);
                }
                let dw = l.skip.dw.as_ref().expect("gradients computed");
                f(l.skip.w.data_mut(), dw.data());
                let db = l.skip.db.as_ref().expect("gradients computed");
                f(&mut l.skip.b, db);
            }
            Layer::Relu(_) | Layer::Gelu(_) | Layer::Dropout(_) => {}
        }
    }

    /// Same walk as [`Layer::visit_params_and_grads`], parameters only.
    pub fn visit_params_mut(&mut self, f: &mut dyn FnMut(&mut [T])) {
        match self {
            Layer::Dense(l) => {
                f(l.w.data_mut());
                f(&mut l.b);
            }
            Layer::Batchnorm(l) => {
                f(&mut l.gamma);
                f(&mut l.beta);
            }
            Layer::ResidualBlock(l) => {
                for layer in &mut l.main {
                    layer.visit_params_mut(f);
                }
                f(l.skip.w.data_mut());
                f(&mut l.skip.b);
            }
            Layer::Relu(_) | Layer::Gelu(_) | Layer::Dropout(_) => {}
        }
    }

    pub fn has_batchnorm(&self) -> bool {
        match self {
            Layer::Batchnorm(_) => true,
            Layer::ResidualBlock(l) => l.main.iter().any(Layer::has_batchnorm),
            _ => false,
        }
    }
}
