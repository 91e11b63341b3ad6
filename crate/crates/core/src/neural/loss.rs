//! Softmax cross-entropy, computed jointly for numerical stability. The
//! loss subtracts each row's maximum logit before exponentiating, so an
//! offset common to a whole row cancels exactly.

use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Row-wise stable softmax.
pub fn softmax_rows<T: Scalar>(logits: &Matrix<T>) -> Matrix<T> {
    let mut probs = logits.clone();
    for b in 0..probs.rows() {
        let row = probs.row_mut(b);
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let mut sum = T::zero();
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    probs
}

/// Mean cross-entropy between softmax(logits) and integer labels, plus
/// the gradient of that mean with respect to the logits.
///
/// With per-class weights `w`, sample `b` of class `y_b` contributes
/// `w[y_b]·(lse_b − z_{b,y_b})` and the mean divides by `Σ_b w[y_b]`
/// instead of the batch size; the gradient is
/// `w[y_b]·(softmax(z_b) − onehot(y_b)) / Σ_b w[y_b]`. `None` weights
/// are the uniform case, dividing by the batch size.
pub fn softmax_cross_entropy<T: Scalar>(
    logits: &Matrix<T>,
    labels: &[usize],
    class_weights: Option<&[T]>,
) -> (T, Matrix<T>) {
    let (batch, classes) = (logits.rows(), logits.cols());
    assert!(batch > 0, "empty batch");
    assert_eq!(batch, labels.len(), "one label per row");
    if let Some(w) = class_weights {
        assert_eq!(w.len(), classes, "one weight per class");
    }

    let mut grad = Matrix::zeros(batch, classes);
    let mut loss = T::zero();
    let mut weight_sum = T::zero();
    for b in 0..batch {
        let y = labels[b];
        assert!(y < classes, "label {y} out of range for {classes} classes");
        let w = class_weights.map_or_else(T::one, |cw| cw[y]);
        weight_sum += w;

        let row = logits.row(b);
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let mut exp_sum = T::zero();
        for &z in row {
            exp_sum += (z - max).exp();
        }
        let lse = max + exp_sum.ln();
        loss += w * (lse - row[y]);

        let grow = grad.row_mut(b);
        for (j, &z) in row.iter().enumerate() {
            let p = (z - lse).exp();
            grow[j] = w * if j == y { p - T::one() } else { p };
        }
    }

    assert!(
        weight_sum > T::zero(),
        "class weights must give the batch positive total weight"
    );
    for g in grad.data_mut() {
        *g /= weight_sum;
    }
    (loss / weight_sum, grad)
}
