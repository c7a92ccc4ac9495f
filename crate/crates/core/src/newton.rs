//! Damped Newton's method with Newton-decrement stopping.
//!
//! The linear solve goes through a symmetric (Cholesky) factorization that
//! fails on non-positive-definite pivots, so breakdown at saddle points
//! surfaces as an explicit error rather than being regularized away.

use crate::error::{Error, Result};
use crate::linesearch::{backtracking_search, LineSearchParams};
use crate::numeric::ParamVector;
use crate::objectives::Objective;

/// Safety cap on damped-Newton iterations.
pub const MAX_NEWTON_ITERS: usize = 1000;

#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub x_star: ParamVector,
    /// lambda(x)^2 / 2 at each visited iterate, including the last.
    pub decrement_history: Vec<f64>,
    pub iterations: usize,
}

/// Newton step delta = -H(x)^{-1} grad f(x), computed by factorization and
/// solve rather than an explicit inverse.
pub fn newton_step(f: &dyn Objective, x: &ParamVector) -> Result<ParamVector> {
    let g = f.gradient(x)?;
    let h = f.hessian(x)?.symmetrized();
    let chol = h.cholesky()?;
    Ok(chol.solve(&g)?.scale(-1.0))
}

/// Newton decrement lambda(x) = (grad^T H^{-1} grad)^{1/2}; lambda^2 / 2
/// estimates the suboptimality gap f(x) - q*, exactly so on quadratics.
pub fn newton_decrement(f: &dyn Objective, x: &ParamVector) -> Result<f64> {
    let g = f.gradient(x)?;
    let h = f.hessian(x)?.symmetrized();
    let s = h.cholesky()?.solve(&g)?;
    Ok(g.dot(&s).max(0.0).sqrt())
}

/// Damped Newton: direction from `newton_step`, step size from backtracking,
/// stop when lambda^2 / 2 <= eps.
pub fn newton_solve(
    f: &dyn Objective,
    x0: &ParamVector,
    eps: f64,
    ls: &LineSearchParams,
) -> Result<NewtonResult> {
    if eps <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let mut x = x0.clone();
    let mut history = Vec::new();
    for iterations in 0..MAX_NEWTON_ITERS {
        let g = f.gradient(&x)?;
        let h = f.hessian(&x)?.symmetrized();
        let chol = h.cholesky()?;
        let hinv_g = chol.solve(&g)?;
        let half_decrement_sq = 0.5 * g.dot(&hinv_g).max(0.0);
        history.push(half_decrement_sq);
        if half_decrement_sq <= eps {
            return Ok(NewtonResult {
                x_star: x,
                decrement_history: history,
                iterations,
            });
        }
        let direction = hinv_g.scale(-1.0);
        let eta = backtracking_search(f, &x, &direction, ls)?;
        x = x.add_scaled(eta, &direction);
    }
    Err(Error::MaxIterations {
        limit: MAX_NEWTON_ITERS,
    })
}
