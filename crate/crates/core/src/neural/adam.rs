//! Adam optimizer with bias correction, plus the step-decay learning-rate
//! schedule used by training (halve every 15 epochs).

use super::model::MlpModel;
use crate::scalar::Scalar;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;
pub const BASE_LR: f64 = 0.001;

/// Learning rate for a zero-based epoch index: `0.001 · 0.5^⌊epoch/15⌋`.
pub fn lr_schedule(epoch: usize) -> f64 {
    BASE_LR * 0.5f64.powi((epoch / 15) as i32)
}

/// First and second moment estimates for one parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments<T> {
    pub m: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> Moments<T> {
    pub fn zeros(len: usize) -> Self {
        Moments {
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
        }
    }
}

/// One Adam update on a parameter tensor. `t` is the 1-based update count
/// used for bias correction.
pub fn adam_step<T: Scalar>(
    params: &mut [T],
    grads: &[T],
    moments: &mut Moments<T>,
    t: u64,
    lr: f64,
) {
    assert_eq!(params.len(), grads.len(), "one gradient per parameter");
    assert_eq!(params.len(), moments.m.len(), "moments sized to tensor");
    assert!(t >= 1, "update count is 1-based");
    let b1 = T::c(BETA1);
    let b2 = T::c(BETA2);
    let eps = T::c(EPSILON);
    let alpha = T::c(lr);
    let corr1 = T::c(1.0 - BETA1.powi(t as i32));
    let corr2 = T::c(1.0 - BETA2.powi(t as i32));
    for i in 0..params.len() {
        let g = grads[i];
        moments.m[i] = b1 * moments.m[i] + (T::one() - b1) * g;
        moments.v[i] = b2 * moments.v[i] + (T::one() - b2) * g * g;
        let m_hat = moments.m[i] / corr1;
        let v_hat = moments.v[i] / corr2;
        params[i] -= alpha * m_hat / (v_hat.sqrt() + eps);
    }
}

/// Optimizer state for a whole model: one [`Moments`] per parameter
/// tensor, in the model's parameter-walk order, allocated on first use.
#[derive(Debug, Clone, Default)]
pub struct AdamState<T> {
    t: u64,
    tensors: Vec<Moments<T>>,
}

impl<T: Scalar> AdamState<T> {
    pub fn new() -> Self {
        AdamState {
            t: 0,
            tensors: Vec::new(),
        }
    }

    /// Apply one update to every parameter tensor from the gradients left
    /// by the model's most recent backward pass.
    pub fn step(&mut self, model: &mut MlpModel<T>, lr: f64) {
        self.t += 1;
        let t = self.t;
        let mut index = 0;
        let tensors = &mut self.tensors;
        model.visit_params_and_grads(&mut |params, grads| {
            if index == tensors.len() {
                tensors.push(Moments::zeros(params.len()));
            }
            adam_step(params, grads, &mut tensors[index], t, lr);
            index += 1;
        });
    }

    pub fn updates(&self) -> u64 {
        self.t
    }
}
