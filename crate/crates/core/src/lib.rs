//! Gradient-descent optimization lab: a catalog of first-order update rules
//! (momentum, NAG, AdaGrad, AdaDelta, RMSprop, Adam, AdaMax, Nadam, AMSGrad,
//! Padam, SGDW, AdamW) behind one stepping contract, the loss functions and
//! benchmark objectives to exercise them on, exact/backtracking line search
//! and damped Newton's method, self-paced example weighting, and a
//! deterministic experiment harness that writes CSV convergence traces.
//!
//! Batch reductions and sampled witnesses use a rayon data-parallel path by
//! default (`parallel` feature); disabling default features leaves the
//! bit-identical sequential fallback.

pub mod error;
pub mod harness;
pub mod linesearch;
pub mod losses;
pub mod newton;
pub mod numeric;
pub mod objectives;
pub mod optim;
pub mod spl;

pub use error::{Error, Result};
pub use numeric::{DenseMatrix, ParamVector, RngStream};
pub use objectives::Objective;
pub use optim::{Algorithm, HyperParams, OptimizerState};
