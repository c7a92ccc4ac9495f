//! Per-algorithm accumulator state and box constraints.

use crate::error::{Error, Result};
use crate::numeric::ParamVector;
use crate::optim::Algorithm;

/// Per-run optimizer state. Fields an algorithm does not use stay at their
/// neutral initialization; the squared-statistic fields (v, v_hat_max, u,
/// delta_acc) are componentwise nonnegative after every step, and v_hat_max
/// is nondecreasing in t.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub algorithm: Algorithm,
    /// Step counter; increments at the start of each step so bias
    /// correction always sees t >= 1.
    pub t: u64,
    /// Momentum buffer / first moment (Z_k, m_t).
    pub m: ParamVector,
    /// Squared-gradient statistic (AdaGrad sum, E[g^2], v_t).
    pub v: ParamVector,
    /// AMSGrad running max of v.
    pub v_hat_max: ParamVector,
    /// AdaMax infinity-norm statistic.
    pub u: ParamVector,
    /// AdaDelta accumulator of squared updates, one step behind.
    pub delta_acc: ParamVector,
    /// Nesterov t_k sequence, t_1 = 1.
    pub nesterov_t: f64,
    /// NAG lookahead point y_k.
    pub lookahead: ParamVector,
    /// Previous iterate, for the NAG correction term.
    pub prev_x: ParamVector,
}

impl OptimizerState {
    pub fn new(algorithm: Algorithm, dim: usize) -> Self {
        OptimizerState {
            algorithm,
            t: 0,
            m: ParamVector::zeros(dim),
            v: ParamVector::zeros(dim),
            v_hat_max: ParamVector::zeros(dim),
            u: ParamVector::zeros(dim),
            delta_acc: ParamVector::zeros(dim),
            nesterov_t: 1.0,
            lookahead: ParamVector::zeros(dim),
            prev_x: ParamVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }
}

/// Axis-aligned feasible box; projection is componentwise clamping. Bounds
/// may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleBox {
    lower: ParamVector,
    upper: ParamVector,
}

impl FeasibleBox {
    pub fn new(lower: ParamVector, upper: ParamVector) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch {
                expected: lower.dim(),
                got: upper.dim(),
            });
        }
        for (lo, hi) in lower.iter().zip(upper.iter()) {
            if lo > hi {
                return Err(Error::InvalidParam(format!(
                    "box lower bound {lo} exceeds upper bound {hi}"
                )));
            }
        }
        Ok(FeasibleBox { lower, upper })
    }

    pub fn unbounded(dim: usize) -> Self {
        FeasibleBox {
            lower: ParamVector::new(vec![f64::NEG_INFINITY; dim]),
            upper: ParamVector::new(vec![f64::INFINITY; dim]),
        }
    }

    pub fn symmetric(dim: usize, half_width: f64) -> Result<Self> {
        FeasibleBox::new(
            ParamVector::new(vec![-half_width; dim]),
            ParamVector::new(vec![half_width; dim]),
        )
    }

    pub fn clamp(&self, x: &ParamVector) -> ParamVector {
        ParamVector::new(
            x.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .map(|(&v, (&lo, &hi))| v.clamp(lo, hi))
                .collect(),
        )
    }

    pub fn is_unbounded(&self) -> bool {
        self.lower.iter().all(|v| *v == f64::NEG_INFINITY)
            && self.upper.iter().all(|v| *v == f64::INFINITY)
    }
}
