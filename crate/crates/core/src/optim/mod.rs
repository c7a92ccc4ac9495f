//! Gradient-descent variants behind one stepping contract.

mod diagnostics;
mod hyper;
mod sampling;
mod state;
mod steps;

pub use diagnostics::{momentum_iteration_spectral_radius, step_diagnostics, StepDiagnostics};
pub use hyper::{DeltaSchedule, HyperParams, MuSchedule};
pub use sampling::{
    full_batch_gradient, minibatch_gradient, stochastic_gradient, MinibatchSampler,
};
pub use state::{FeasibleBox, OptimizerState};
pub use steps::{
    adadelta_step, adagrad_step, adam_step, adamax_step, adamw_step, amsgrad_step, apply_step,
    gd_step, momentum_step, nadam_step, optimal_momentum_params, padam_step, rmsprop_step,
    sgdw_step, GradientInput,
};

use crate::error::{Error, Result};

/// Every optimizer in the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Gd,
    Momentum,
    Nag,
    Adagrad,
    Adadelta,
    Rmsprop,
    Adam,
    Adamax,
    Nadam,
    Amsgrad,
    Padam,
    Sgdw,
    Adamw,
}

impl Algorithm {
    pub const ALL: [Algorithm; 13] = [
        Algorithm::Gd,
        Algorithm::Momentum,
        Algorithm::Nag,
        Algorithm::Adagrad,
        Algorithm::Adadelta,
        Algorithm::Rmsprop,
        Algorithm::Adam,
        Algorithm::Adamax,
        Algorithm::Nadam,
        Algorithm::Amsgrad,
        Algorithm::Padam,
        Algorithm::Sgdw,
        Algorithm::Adamw,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Gd => "gd",
            Algorithm::Momentum => "momentum",
            Algorithm::Nag => "nag",
            Algorithm::Adagrad => "adagrad",
            Algorithm::Adadelta => "adadelta",
            Algorithm::Rmsprop => "rmsprop",
            Algorithm::Adam => "adam",
            Algorithm::Adamax => "adamax",
            Algorithm::Nadam => "nadam",
            Algorithm::Amsgrad => "amsgrad",
            Algorithm::Padam => "padam",
            Algorithm::Sgdw => "sgdw",
            Algorithm::Adamw => "adamw",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|a| a.name() == name)
            .ok_or_else(|| Error::InvalidParam(format!("unknown optimizer '{name}'")))
    }

    /// NAG evaluates the gradient at its own lookahead point, so it needs
    /// the objective rather than a precomputed gradient.
    pub fn needs_objective(&self) -> bool {
        matches!(self, Algorithm::Nag)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
