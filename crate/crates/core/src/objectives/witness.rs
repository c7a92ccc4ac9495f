//! Sampled numeric witnesses for convexity and saddle-order properties.
//!
//! These are probabilistic refuters, not proofs: a clean run over the
//! sampled box is evidence, a reported violation is a certificate. Sample
//! points come from an axis-aligned box so that the checks can actually
//! reach the corner regions where order bounds fail.

use crate::error::{Error, Result};
use crate::numeric::{ParamVector, RngStream};
use crate::objectives::Objective;

/// A sampled inequality must fail by more than this before it counts as a
/// violation.
pub const WITNESS_VIOLATION_TOL: f64 = 1e-9;

/// Outcome of a strong-convexity scan: either no violation over `samples`
/// pairs, or the first violating pair.
#[derive(Debug, Clone)]
pub struct ConvexityWitness {
    pub alpha: f64,
    pub samples: usize,
    pub violated_pair: Option<(ParamVector, ParamVector)>,
}

impl ConvexityWitness {
    pub fn holds(&self) -> bool {
        self.violated_pair.is_none()
    }
}

fn find_first_violation<T: Send + Sync>(
    items: &[T],
    violates: impl Fn(&T) -> Result<bool> + Sync,
) -> Result<Option<usize>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let hits: Result<Vec<bool>> = items.par_iter().map(&violates).collect();
        Ok(hits?.into_iter().position(|v| v))
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (i, item) in items.iter().enumerate() {
            if violates(item)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

/// Scans random pairs (x, y) in [-half_width, half_width]^n for violations
/// of f(y) >= f(x) + grad f(x)^T (y - x) + (alpha/2) ||x - y||^2.
///
/// alpha = 0 checks plain convexity through the first-order underestimator.
pub fn strong_convexity_witness(
    f: &dyn Objective,
    alpha: f64,
    trials: usize,
    rng: &mut RngStream,
    half_width: f64,
) -> Result<ConvexityWitness> {
    if trials == 0 {
        return Err(Error::InvalidParam("trials must be >= 1".into()));
    }
    let n = f.dim();
    let pairs: Vec<(ParamVector, ParamVector)> = (0..trials)
        .map(|_| {
            (
                rng.uniform_vector(n, -half_width, half_width),
                rng.uniform_vector(n, -half_width, half_width),
            )
        })
        .collect();

    let check = |(x, y): &(ParamVector, ParamVector)| -> Result<bool> {
        let (fx, gx) = f.value_and_grad(x)?;
        let fy = f.value(y)?;
        let diff = y.sub(x);
        let bound = fx + gx.dot(&diff) + 0.5 * alpha * diff.dot(&diff);
        Ok(fy < bound - WITNESS_VIOLATION_TOL)
    };

    let hit = find_first_violation(&pairs, check)?;
    Ok(ConvexityWitness {
        alpha,
        samples: trials,
        violated_pair: hit.map(|i| pairs[i].clone()),
    })
}

/// Polyak-Lojasiewicz check at a single point:
/// f(x) - q_star <= ||grad f(x)||^2 / (2 alpha).
pub fn pl_gap_bound(f: &dyn Objective, q_star: f64, alpha: f64, x: &ParamVector) -> Result<bool> {
    if alpha <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let (fx, gx) = f.value_and_grad(x)?;
    Ok(fx - q_star <= gx.dot(&gx) / (2.0 * alpha))
}

/// Tests the order-n saddle inequality f(x') >= f(x) - c ||x - x'||^(n+1)
/// over samples drawn from the axis-aligned box of the given half-width
/// around the critical point. The big-O constant is surfaced as `c`.
pub fn saddle_order_witness(
    f: &dyn Objective,
    x_saddle: &ParamVector,
    order_n: u32,
    c: f64,
    radius: f64,
    samples: usize,
    rng: &mut RngStream,
) -> Result<bool> {
    if order_n < 1 || c <= 0.0 || radius <= 0.0 || samples == 0 {
        return Err(Error::InvalidParam(
            "saddle witness requires n >= 1, c > 0, radius > 0, samples >= 1".into(),
        ));
    }
    let grad_norm = f.gradient(x_saddle)?.norm();
    if grad_norm > 1e-8 {
        return Err(Error::NotCriticalPoint { grad_norm });
    }
    let f0 = f.value(x_saddle)?;
    let n = f.dim();
    let points: Vec<ParamVector> = (0..samples)
        .map(|_| {
            let offset = rng.uniform_vector(n, -radius, radius);
            x_saddle.add_scaled(1.0, &offset)
        })
        .collect();

    let exponent = (order_n + 1) as i32;
    let check = |p: &ParamVector| -> Result<bool> {
        let dist = p.sub(x_saddle).norm();
        let bound = f0 - c * dist.powi(exponent);
        Ok(f.value(p)? < bound - WITNESS_VIOLATION_TOL)
    };
    Ok(find_first_violation(&points, check)?.is_none())
}
