//! Benchmark objectives, ERM composition, and convexity/saddle diagnostics.

mod benchmarks;
pub mod dataset;
mod erm;
mod quadratic;
mod stream;
mod witness;

pub use benchmarks::{Rosenbrock, SaddleBenchmark};
pub use dataset::{Dataset, Targets};
pub use erm::{ErmObjective, LossKind, ModelKind};
pub use quadratic::QuadraticForm;
pub use stream::AdversarialStream;
pub use witness::{
    pl_gap_bound, saddle_order_witness, strong_convexity_witness, ConvexityWitness,
    WITNESS_VIOLATION_TOL,
};

use crate::error::{Error, Result};
use crate::numeric::{DenseMatrix, ParamVector};

/// Differentiable function contract shared by every optimizer and solver.
///
/// Objectives are immutable after construction and safe to evaluate
/// concurrently.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &ParamVector) -> Result<f64>;

    fn gradient(&self, x: &ParamVector) -> Result<ParamVector>;

    fn value_and_grad(&self, x: &ParamVector) -> Result<(f64, ParamVector)> {
        Ok((self.value(x)?, self.gradient(x)?))
    }

    /// Analytic Hessian where one is available.
    fn hessian(&self, _x: &ParamVector) -> Result<DenseMatrix> {
        Err(Error::HessianUnavailable)
    }
}

/// Objective defined by a closure; handy for tests, witnesses, and
/// finite-difference checks of free-standing formulas.
pub struct FnObjective<F: Fn(&[f64]) -> f64 + Sync> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnObjective { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &ParamVector) -> Result<f64> {
        x.check_dim(self.dim)?;
        Ok((self.f)(x.as_slice()))
    }

    fn gradient(&self, x: &ParamVector) -> Result<ParamVector> {
        crate::numeric::finite_diff_gradient(self, x, crate::numeric::DEFAULT_GRAD_STEP)
    }
}
