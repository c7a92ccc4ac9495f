//! Saddle-point and non-convex benchmark functions.

use crate::error::{Error, Result};
use crate::numeric::{DenseMatrix, ParamVector};
use crate::objectives::Objective;

/// Two-dimensional saddle benchmarks with known saddle order at the origin.
///
/// The hyperbolic saddle x1^2 - x2^2 is first order: its Hessian at the
/// origin has a negative eigenvalue. The monkey saddle x1^3 - 3 x2^2 x1 is
/// second order: the Hessian at the origin vanishes entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleBenchmark {
    Hyperbolic,
    Monkey,
}

impl SaddleBenchmark {
    /// Saddle order at the origin.
    pub fn order(&self) -> u32 {
        match self {
            SaddleBenchmark::Hyperbolic => 1,
            SaddleBenchmark::Monkey => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SaddleBenchmark::Hyperbolic => "hyperbolic",
            SaddleBenchmark::Monkey => "monkey",
        }
    }
}

impl Objective for SaddleBenchmark {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &ParamVector) -> Result<f64> {
        x.check_dim(2)?;
        let (a, b) = (x[0], x[1]);
        Ok(match self {
            SaddleBenchmark::Hyperbolic => a * a - b * b,
            SaddleBenchmark::Monkey => a * a * a - 3.0 * b * b * a,
        })
    }

    fn gradient(&self, x: &ParamVector) -> Result<ParamVector> {
        x.check_dim(2)?;
        let (a, b) = (x[0], x[1]);
        Ok(match self {
            SaddleBenchmark::Hyperbolic => ParamVector::new(vec![2.0 * a, -2.0 * b]),
            SaddleBenchmark::Monkey => {
                ParamVector::new(vec![3.0 * a * a - 3.0 * b * b, -6.0 * b * a])
            }
        })
    }

    fn hessian(&self, x: &ParamVector) -> Result<DenseMatrix> {
        x.check_dim(2)?;
        let (a, b) = (x[0], x[1]);
        Ok(match self {
            SaddleBenchmark::Hyperbolic => DenseMatrix::from_diag(&[2.0, -2.0]),
            SaddleBenchmark::Monkey => DenseMatrix::new(
                2,
                2,
                vec![6.0 * a, -6.0 * b, -6.0 * b, -6.0 * a],
            )
            .expect("2x2"),
        })
    }
}

/// Rosenbrock valley f(x) = (a - x1)^2 + b (x2 - x1^2)^2, global minimum 0
/// at (a, a^2).
#[derive(Debug, Clone, Copy)]
pub struct Rosenbrock {
    a: f64,
    b: f64,
}

impl Rosenbrock {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if b <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "rosenbrock requires b > 0, got {b}"
            )));
        }
        Ok(Rosenbrock { a, b })
    }

    pub fn minimizer(&self) -> ParamVector {
        ParamVector::new(vec![self.a, self.a * self.a])
    }
}

impl Objective for Rosenbrock {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &ParamVector) -> Result<f64> {
        x.check_dim(2)?;
        let (x1, x2) = (x[0], x[1]);
        Ok((self.a - x1).powi(2) + self.b * (x2 - x1 * x1).powi(2))
    }

    fn gradient(&self, x: &ParamVector) -> Result<ParamVector> {
        x.check_dim(2)?;
        let (x1, x2) = (x[0], x[1]);
        let inner = x2 - x1 * x1;
        Ok(ParamVector::new(vec![
            -2.0 * (self.a - x1) - 4.0 * self.b * x1 * inner,
            2.0 * self.b * inner,
        ]))
    }

    fn hessian(&self, x: &ParamVector) -> Result<DenseMatrix> {
        x.check_dim(2)?;
        let (x1, x2) = (x[0], x[1]);
        let h11 = 2.0 - 4.0 * self.b * (x2 - 3.0 * x1 * x1);
        let h12 = -4.0 * self.b * x1;
        DenseMatrix::new(2, 2, vec![h11, h12, h12, 2.0 * self.b])
    }
}
