//! Quadratic-form objective f(x) = (1/2) x^T A x + b^T x.

use crate::error::Result;
use crate::numeric::{DenseMatrix, ParamVector};
use crate::objectives::Objective;

/// Quadratic form with symmetric A: gradient Ax + b, Hessian A.
///
/// A is symmetrized at construction (with a logged warning above the 1e-12
/// asymmetry tolerance) so value, gradient, and Hessian stay consistent.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    a: DenseMatrix,
    b: Option<ParamVector>,
}

impl QuadraticForm {
    pub fn new(a: DenseMatrix, b: Option<ParamVector>) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(crate::error::Error::DimensionMismatch {
                expected: a.rows(),
                got: a.cols(),
            });
        }
        if let Some(b) = &b {
            b.check_dim(a.rows())?;
        }
        Ok(QuadraticForm {
            a: a.symmetrized(),
            b,
        })
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        QuadraticForm {
            a: DenseMatrix::from_diag(diag),
            b: None,
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }
}

impl Objective for QuadraticForm {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn value(&self, x: &ParamVector) -> Result<f64> {
        let ax = self.a.matvec(x)?;
        let mut v = 0.5 * x.dot(&ax);
        if let Some(b) = &self.b {
            v += b.dot(x);
        }
        Ok(v)
    }

    fn gradient(&self, x: &ParamVector) -> Result<ParamVector> {
        let ax = self.a.matvec(x)?;
        Ok(match &self.b {
            Some(b) => ax.add_scaled(1.0, b),
            None => ax,
        })
    }

    fn hessian(&self, x: &ParamVector) -> Result<DenseMatrix> {
        x.check_dim(self.dim())?;
        Ok(self.a.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_example() {
        // A = diag(1,100) at (1,1): value 50.5, grad (1,100).
        let q = QuadraticForm::from_diag(&[1.0, 100.0]);
        let x = ParamVector::new(vec![1.0, 1.0]);
        let (v, g) = q.value_and_grad(&x).unwrap();
        assert!((v - 50.5).abs() < 1e-12);
        assert_eq!(g.as_slice(), &[1.0, 100.0]);
    }

    #[test]
    fn hessian_is_a_exactly() {
        let q = QuadraticForm::from_diag(&[2.0, 3.0]);
        let h = q.hessian(&ParamVector::zeros(2)).unwrap();
        assert_eq!(h, DenseMatrix::from_diag(&[2.0, 3.0]));
    }

    #[test]
    fn linear_term() {
        let q = QuadraticForm::new(
            DenseMatrix::identity(2),
            Some(ParamVector::new(vec![1.0, -1.0])),
        )
        .unwrap();
        let x = ParamVector::new(vec![2.0, 2.0]);
        assert_eq!(q.value(&x).unwrap(), 4.0);
        assert_eq!(q.gradient(&x).unwrap().as_slice(), &[3.0, 1.0]);
    }
}
