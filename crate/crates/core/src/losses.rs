//! Loss catalog with analytic gradients with respect to predictions.
//!
//! Cross-entropies use the negated (nonnegative) form: the printed equations
//! without the leading minus would be nonpositive, so the sign is fixed here
//! once and documented. Probabilities are clamped to
//! `[PROB_CLAMP, 1 - PROB_CLAMP]` inside logarithms, so a confident
//! misclassification produces a large finite loss instead of infinity and
//! gradients stay usable by optimizers.

use crate::error::{Error, Result};
use crate::numeric::{DenseMatrix, ParamVector};

/// Library-wide probability clamp used inside logarithms.
pub const PROB_CLAMP: f64 = 1e-12;

/// Tolerance for the "sums to one" probability-vector invariant.
pub const PROB_SUM_TOL: f64 = 1e-9;

/// A loss evaluation: scalar value plus gradient with respect to the
/// predictions (flattened row-major for matrix-valued predictions).
#[derive(Debug, Clone)]
pub struct LossValue {
    pub value: f64,
    pub grad: Vec<f64>,
}

/// L2 regularization term (lambda/2) ||x||^2; lambda = 0 disables it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationTerm {
    lambda: f64,
}

impl RegularizationTerm {
    pub fn l2(lambda: f64) -> Result<Self> {
        if lambda < 0.0 {
            return Err(Error::InvalidParam(format!(
                "regularization lambda must be nonnegative, got {lambda}"
            )));
        }
        Ok(RegularizationTerm { lambda })
    }

    pub fn none() -> Self {
        RegularizationTerm { lambda: 0.0 }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn value_and_grad(&self, x: &ParamVector) -> (f64, ParamVector) {
        let value = 0.5 * self.lambda * x.dot(x);
        (value, x.scale(self.lambda))
    }
}

fn check_batch(y_true: &[f64], y_pred: &[f64]) -> Result<usize> {
    if y_true.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    Ok(y_true.len())
}

fn check_probability_vector(p: &[f64]) -> Result<()> {
    if p.iter().any(|&v| v < 0.0) {
        return Err(Error::Domain(
            "probability vector has a negative entry".into(),
        ));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::Domain(format!(
            "probability vector sums to {sum}, expected 1 within {PROB_SUM_TOL:e}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Per-example kernels, shared with the ERM objectives. Values and gradients
// are unnormalized; batch wrappers apply the 1/N factor.
// ---------------------------------------------------------------------------

pub(crate) fn mse_point(y: f64, y_pred: f64) -> (f64, f64) {
    let r = y - y_pred;
    (r * r, -2.0 * r)
}

pub(crate) fn mae_point(y: f64, y_pred: f64) -> (f64, f64) {
    let r = y - y_pred;
    // Subgradient 0 at the kink keeps optimizers stationary at a perfect fit.
    let sign = if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    };
    (r.abs(), -sign)
}

pub(crate) fn msle_point(y: f64, y_pred: f64) -> Result<(f64, f64)> {
    if y <= -1.0 || y_pred <= -1.0 {
        return Err(Error::Domain(format!(
            "msle requires inputs > -1, got y={y}, y_pred={y_pred}"
        )));
    }
    let d = (y + 1.0).ln() - (y_pred + 1.0).ln();
    Ok((d * d, -2.0 * d / (y_pred + 1.0)))
}

/// Binary cross-entropy of one example; `p` is the predicted probability of
/// class 1. Each log argument is clamped from below, so perfect predictions
/// score exactly 0 while confident misclassifications stay large but
/// finite; the gradient is of the clamped loss, flat inside a clamp region.
pub(crate) fn bce_point(y: f64, p: f64) -> Result<(f64, f64)> {
    if y != 0.0 && y != 1.0 {
        return Err(Error::Domain(format!(
            "binary target must be exactly 0 or 1, got {y}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "predicted probability must lie in [0, 1], got {p}"
        )));
    }
    let p1 = p.max(PROB_CLAMP);
    let p0 = (1.0 - p).max(PROB_CLAMP);
    let value = -(y * p1.ln() + (1.0 - y) * p0.ln());
    let mut grad = 0.0;
    if p > PROB_CLAMP {
        grad -= y / p1;
    }
    if 1.0 - p > PROB_CLAMP {
        grad += (1.0 - y) / p0;
    }
    Ok((value, grad))
}

// ---------------------------------------------------------------------------
// Batch losses
// ---------------------------------------------------------------------------

/// Mean squared error: (1/N) sum (y_i - y_pred_i)^2.
pub fn mse(y_true: &[f64], y_pred: &[f64]) -> Result<LossValue> {
    let n = check_batch(y_true, y_pred)? as f64;
    let mut value = 0.0;
    let mut grad = Vec::with_capacity(y_true.len());
    for (&y, &p) in y_true.iter().zip(y_pred) {
        let (l, g) = mse_point(y, p);
        value += l;
        grad.push(g / n);
    }
    Ok(LossValue {
        value: value / n,
        grad,
    })
}

/// Mean absolute error: (1/N) sum |y_i - y_pred_i|.
pub fn mae(y_true: &[f64], y_pred: &[f64]) -> Result<LossValue> {
    let n = check_batch(y_true, y_pred)? as f64;
    let mut value = 0.0;
    let mut grad = Vec::with_capacity(y_true.len());
    for (&y, &p) in y_true.iter().zip(y_pred) {
        let (l, g) = mae_point(y, p);
        value += l;
        grad.push(g / n);
    }
    Ok(LossValue {
        value: value / n,
        grad,
    })
}

/// Mean squared logarithmic error: (1/N) sum (log(y_i+1) - log(y_pred_i+1))^2.
/// The +1 padding keeps log(0) out of the domain; all inputs must be > -1.
pub fn msle(y_true: &[f64], y_pred: &[f64]) -> Result<LossValue> {
    let n = check_batch(y_true, y_pred)? as f64;
    let mut value = 0.0;
    let mut grad = Vec::with_capacity(y_true.len());
    for (&y, &p) in y_true.iter().zip(y_pred) {
        let (l, g) = msle_point(y, p)?;
        value += l;
        grad.push(g / n);
    }
    Ok(LossValue {
        value: value / n,
        grad,
    })
}

/// Binary cross-entropy with probability clamping.
pub fn bce(y_true: &[f64], y_pred: &[f64]) -> Result<LossValue> {
    let n = check_batch(y_true, y_pred)? as f64;
    let mut value = 0.0;
    let mut grad = Vec::with_capacity(y_true.len());
    for (&y, &p) in y_true.iter().zip(y_pred) {
        let (l, g) = bce_point(y, p)?;
        value += l;
        grad.push(g / n);
    }
    Ok(LossValue {
        value: value / n,
        grad,
    })
}

/// Categorical cross-entropy over class-index targets and an N x C matrix of
/// predicted probability vectors. One-hot expansion of the targets happens
/// here. The gradient is returned flattened row-major (N x C).
pub fn cce(classes: &[usize], probs: &DenseMatrix) -> Result<LossValue> {
    if classes.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if classes.len() != probs.rows() {
        return Err(Error::DimensionMismatch {
            expected: classes.len(),
            got: probs.rows(),
        });
    }
    let n_classes = probs.cols();
    for (i, &class) in classes.iter().enumerate() {
        if class >= n_classes {
            return Err(Error::Domain(format!(
                "class index {class} out of range for {n_classes} classes"
            )));
        }
        check_probability_vector(probs.row(i))?;
    }
    let (value, grad) = cce_unchecked(classes, probs.as_slice(), n_classes);
    Ok(LossValue { value, grad })
}

/// CCE formula over a flattened row-major N x C probability matrix, without
/// the simplex validation; gradient checks perturb rows off the simplex,
/// where the clamped-log form still extends smoothly.
pub(crate) fn cce_unchecked(classes: &[usize], probs_flat: &[f64], n_classes: usize) -> (f64, Vec<f64>) {
    let n = classes.len() as f64;
    let mut value = 0.0;
    let mut grad = vec![0.0; probs_flat.len()];
    for (i, &class) in classes.iter().enumerate() {
        let p = probs_flat[i * n_classes + class];
        let clamped = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
        value -= clamped.ln();
        if p > PROB_CLAMP && p < 1.0 - PROB_CLAMP {
            grad[i * n_classes + class] = -1.0 / (clamped * n);
        }
    }
    (value / n, grad)
}

/// Discrete Kullback-Leibler divergence sum_c p_c log(p_c / q_c), with the
/// convention 0 * log(0/q) = 0 and q clamped below where p > 0.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    kl_divergence_with_grad(p, q).map(|(value, _)| value)
}

/// KL divergence together with its gradient with respect to q
/// (dD/dq_c = -p_c / q_c on the clamped formula).
pub fn kl_divergence_with_grad(p: &[f64], q: &[f64]) -> Result<(f64, Vec<f64>)> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    check_probability_vector(p)?;
    check_probability_vector(q)?;
    Ok(kl_unchecked(p, q))
}

/// KL formula without the probability-vector validation; used by gradient
/// checks that perturb q off the simplex.
pub(crate) fn kl_unchecked(p: &[f64], q: &[f64]) -> (f64, Vec<f64>) {
    let mut value = 0.0;
    let mut grad = vec![0.0; q.len()];
    for (c, (&pc, &qc)) in p.iter().zip(q).enumerate() {
        if pc == 0.0 {
            continue;
        }
        let qc = qc.max(PROB_CLAMP);
        value += pc * (pc / qc).ln();
        grad[c] = -pc / qc;
    }
    (value, grad)
}

/// L2 regularizer: ((lambda/2) ||x||^2, lambda * x).
pub fn l2_regularizer(x: &ParamVector, lambda: f64) -> Result<(f64, ParamVector)> {
    Ok(RegularizationTerm::l2(lambda)?.value_and_grad(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{finite_diff_gradient, relative_error, RngStream};
    use crate::objectives::FnObjective;

    #[test]
    fn mse_examples() {
        assert_eq!(
            mse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap().value,
            0.0
        );
        assert_eq!(mse(&[0.0, 0.0], &[1.0, 1.0]).unwrap().value, 1.0);
        // (1 + 1 + 100) / 3
        let v = mse(&[0.0, 0.0, 0.0], &[1.0, 1.0, 10.0]).unwrap().value;
        assert!((v - 34.0).abs() < 1e-12);
        assert!(matches!(mse(&[], &[]), Err(Error::EmptyBatch)));
    }

    #[test]
    fn mae_examples() {
        assert_eq!(mae(&[5.0], &[5.0]).unwrap().value, 0.0);
        let v = mae(&[0.0, 0.0, 0.0], &[1.0, 1.0, 10.0]).unwrap().value;
        assert!((v - 4.0).abs() < 1e-12);
        // Subgradient 0 at the kink.
        assert_eq!(mae(&[2.0], &[2.0]).unwrap().grad, vec![0.0]);
    }

    #[test]
    fn msle_examples() {
        assert_eq!(msle(&[3.0], &[3.0]).unwrap().value, 0.0);
        let v = msle(&[std::f64::consts::E - 1.0], &[0.0]).unwrap().value;
        assert!((v - 1.0).abs() < 1e-12);
        // Undershooting costs more than overshooting by the same margin.
        let under = msle(&[10.0], &[5.0]).unwrap().value;
        let over = msle(&[10.0], &[15.0]).unwrap().value;
        assert!(under > over);
        assert!(matches!(msle(&[-1.5], &[0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn bce_examples() {
        assert_eq!(bce(&[1.0], &[1.0]).unwrap().value, 0.0);
        let v = bce(&[1.0], &[0.5]).unwrap().value;
        assert!((v - std::f64::consts::LN_2).abs() < 1e-12);
        // Confident misclassification clamps to a large finite value.
        let v = bce(&[1.0], &[0.0]).unwrap().value;
        assert!((v - (-PROB_CLAMP.ln())).abs() < 1e-9);
        assert!(v.is_finite());
        assert!(matches!(bce(&[0.5], &[0.5]), Err(Error::Domain(_))));
    }

    #[test]
    fn cce_examples() {
        let one_hot = DenseMatrix::new(1, 3, vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(cce(&[0], &one_hot).unwrap().value, 0.0);

        let uniform = DenseMatrix::new(1, 3, vec![1.0 / 3.0; 3]).unwrap();
        let v = cce(&[0], &uniform).unwrap().value;
        assert!((v - 3.0f64.ln()).abs() < 1e-12);

        let bad = DenseMatrix::new(1, 2, vec![0.9, 0.3]).unwrap();
        assert!(matches!(cce(&[0], &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn cce_nonnegative_on_random_inputs() {
        let mut rng = RngStream::new(11);
        for _ in 0..200 {
            let raw: Vec<f64> = (0..4).map(|_| rng.uniform(0.01, 1.0)).collect();
            let sum: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|v| v / sum).collect();
            let m = DenseMatrix::new(1, 4, probs).unwrap();
            let class = rng.uniform_usize(4);
            assert!(cce(&[class], &m).unwrap().value >= 0.0);
        }
    }

    #[test]
    fn bce_cce_agree_on_two_classes() {
        let mut rng = RngStream::new(5);
        for _ in 0..1000 {
            let y = rng.uniform_usize(2) as f64;
            let p = rng.uniform(0.001, 0.999);
            let b = bce(&[y], &[p]).unwrap().value;
            let m = DenseMatrix::new(1, 2, vec![1.0 - p, p]).unwrap();
            let c = cce(&[y as usize], &m).unwrap().value;
            assert!((b - c).abs() < 1e-12, "bce={b} cce={c}");
        }
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_divergence(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        let v = kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(matches!(
            kl_divergence(&[1.0], &[0.5, 0.5]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kl_gibbs_inequality_sampled() {
        let mut rng = RngStream::new(13);
        for _ in 0..1000 {
            let dim = 2 + rng.uniform_usize(6);
            let draw = |rng: &mut RngStream| {
                let raw: Vec<f64> = (0..dim).map(|_| rng.uniform(0.01, 1.0)).collect();
                let s: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / s).collect::<Vec<_>>()
            };
            let p = draw(&mut rng);
            let q = draw(&mut rng);
            assert!(kl_divergence(&p, &q).unwrap() >= 0.0);
        }
    }

    #[test]
    fn l2_regularizer_examples() {
        let x = ParamVector::new(vec![3.0, 4.0]);
        let (v, g) = l2_regularizer(&x, 0.0).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(g.as_slice(), &[0.0, 0.0]);

        let (v, g) = l2_regularizer(&x, 2.0).unwrap();
        assert_eq!(v, 25.0);
        assert_eq!(g.as_slice(), &[6.0, 8.0]);

        assert!(l2_regularizer(&x, -0.1).is_err());
    }

    /// Every loss gradient matches central finite differences at seeded
    /// interior points, away from clamps and kinks.
    #[test]
    fn loss_gradients_match_finite_differences() {
        let mut rng = RngStream::new(99);
        for _ in 0..100 {
            let n = 3;
            let y: Vec<f64> = (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let pred: Vec<f64> = (0..n)
                .map(|i| {
                    // Keep residuals off the MAE kink.
                    let mut p = rng.uniform(-2.0, 2.0);
                    if (y[i] - p).abs() < 1e-2 {
                        p += 0.5;
                    }
                    p
                })
                .collect();

            for loss_fn in [mse as fn(&[f64], &[f64]) -> Result<LossValue>, mae] {
                let analytic = loss_fn(&y, &pred).unwrap().grad;
                let yc = y.clone();
                let obj =
                    FnObjective::new(n, move |p: &[f64]| loss_fn(&yc, p).unwrap().value);
                let fd = finite_diff_gradient(&obj, &ParamVector::new(pred.clone()), 1e-5)
                    .unwrap();
                let err = relative_error(&ParamVector::new(analytic), &fd);
                assert!(err < 1e-6, "rel err {err}");
            }

            // msle on its positive domain.
            let y_pos: Vec<f64> = y.iter().map(|v| v.abs() + 0.1).collect();
            let p_pos: Vec<f64> = pred.iter().map(|v| v.abs() + 0.2).collect();
            let analytic = msle(&y_pos, &p_pos).unwrap().grad;
            let yc = y_pos.clone();
            let obj = FnObjective::new(n, move |p: &[f64]| msle(&yc, p).unwrap().value);
            let fd = finite_diff_gradient(&obj, &ParamVector::new(p_pos), 1e-5).unwrap();
            assert!(relative_error(&ParamVector::new(analytic), &fd) < 1e-6);

            // bce away from the clamp.
            let yb: Vec<f64> = (0..n).map(|_| rng.uniform_usize(2) as f64).collect();
            let pb: Vec<f64> = (0..n).map(|_| rng.uniform(0.05, 0.95)).collect();
            let analytic = bce(&yb, &pb).unwrap().grad;
            let yc = yb.clone();
            let obj = FnObjective::new(n, move |p: &[f64]| bce(&yc, p).unwrap().value);
            let fd = finite_diff_gradient(&obj, &ParamVector::new(pb), 1e-5).unwrap();
            assert!(relative_error(&ParamVector::new(analytic), &fd) < 1e-6);
        }
    }

    #[test]
    fn losses_zero_iff_perfect_prediction() {
        let y = [0.3, 1.7];
        assert_eq!(mse(&y, &y).unwrap().value, 0.0);
        assert_eq!(mae(&y, &y).unwrap().value, 0.0);
        assert_eq!(msle(&y, &y).unwrap().value, 0.0);
        let off = [0.4, 1.7];
        assert!(mse(&y, &off).unwrap().value > 0.0);
        assert!(mae(&y, &off).unwrap().value > 0.0);
        assert!(msle(&y, &off).unwrap().value > 0.0);
    }
}
