//! Vector/matrix primitives, seeded randomness, and finite-difference
//! oracles that every other module builds on.

mod finite_diff;
mod matrix;
mod rng;
mod vector;

pub use finite_diff::{
    finite_diff_gradient, finite_diff_hessian, relative_error, DEFAULT_GRAD_STEP,
    DEFAULT_HESS_STEP,
};
pub use matrix::{Cholesky, DenseMatrix, SYMMETRY_TOL};
pub use rng::{substream, RngStream};
pub use vector::ParamVector;
