//! Central-difference oracles for gradient and Hessian checks.
//!
//! Central differences (not forward) balance truncation against rounding at
//! double precision; `h = 1e-5` is the default scale for gradients.

use crate::error::{Error, Result};
use crate::numeric::{DenseMatrix, ParamVector};
use crate::objectives::Objective;

/// Default perturbation for gradient checks.
pub const DEFAULT_GRAD_STEP: f64 = 1e-5;
/// Default perturbation for Hessian checks (larger, second differences are
/// noisier).
pub const DEFAULT_HESS_STEP: f64 = 1e-4;

fn eval_at(f: &dyn Objective, x: &mut ParamVector, coord: usize) -> Result<f64> {
    let v = f.value(x)?;
    if !v.is_finite() {
        return Err(Error::NonFinite {
            context: "finite-difference evaluation",
            coordinate: coord,
        });
    }
    Ok(v)
}

/// Central-difference gradient: g_i = (f(x + h e_i) - f(x - h e_i)) / (2h).
pub fn finite_diff_gradient(f: &dyn Objective, x: &ParamVector, h: f64) -> Result<ParamVector> {
    if h <= 0.0 {
        return Err(Error::InvalidParam(format!("h must be positive, got {h}")));
    }
    x.check_dim(f.dim())?;
    let mut probe = x.clone();
    let mut grad = Vec::with_capacity(x.dim());
    for i in 0..x.dim() {
        let xi = x[i];
        probe[i] = xi + h;
        let f_plus = eval_at(f, &mut probe, i)?;
        probe[i] = xi - h;
        let f_minus = eval_at(f, &mut probe, i)?;
        probe[i] = xi;
        grad.push((f_plus - f_minus) / (2.0 * h));
    }
    Ok(ParamVector::new(grad))
}

/// Central second differences, symmetrized as (H + H^T) / 2.
pub fn finite_diff_hessian(f: &dyn Objective, x: &ParamVector, h: f64) -> Result<DenseMatrix> {
    if h <= 0.0 {
        return Err(Error::InvalidParam(format!("h must be positive, got {h}")));
    }
    x.check_dim(f.dim())?;
    let n = x.dim();
    let mut probe = x.clone();
    let f0 = eval_at(f, &mut probe, 0)?;
    let mut hess = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let xi = x[i];
        probe[i] = xi + h;
        let f_plus = eval_at(f, &mut probe, i)?;
        probe[i] = xi - h;
        let f_minus = eval_at(f, &mut probe, i)?;
        probe[i] = xi;
        hess.set(i, i, (f_plus - 2.0 * f0 + f_minus) / (h * h));
        for j in (i + 1)..n {
            let xj = x[j];
            probe[i] = xi + h;
            probe[j] = xj + h;
            let fpp = eval_at(f, &mut probe, j)?;
            probe[j] = xj - h;
            let fpm = eval_at(f, &mut probe, j)?;
            probe[i] = xi - h;
            probe[j] = xj + h;
            let fmp = eval_at(f, &mut probe, j)?;
            probe[j] = xj - h;
            let fmm = eval_at(f, &mut probe, j)?;
            probe[i] = xi;
            probe[j] = xj;
            let hij = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess.set(i, j, hij);
            hess.set(j, i, hij);
        }
    }
    // Off-diagonals are written symmetrically above; the explicit pass keeps
    // the (H + H^T)/2 contract even if that changes.
    Ok(hess.symmetrized())
}

/// Gradient-check metric: ||a - b||_inf / max(1, ||b||_2). The max(1, .)
/// denominator avoids division by near-zero at critical points.
pub fn relative_error(candidate: &ParamVector, reference: &ParamVector) -> f64 {
    candidate.sub(reference).inf_norm() / reference.norm().max(1.0)
}
