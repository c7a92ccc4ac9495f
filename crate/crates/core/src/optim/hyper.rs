//! Hyperparameters shared by the optimizer catalog.

use crate::error::{Error, Result};
use crate::optim::Algorithm;

/// Schedule for the decoupled-decay multiplier delta_t (fixed by default,
/// optionally decaying).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaSchedule {
    Constant(f64),
    /// delta_t = scale / sqrt(t), t >= 1.
    InvSqrt { scale: f64 },
}

impl DeltaSchedule {
    pub fn at(&self, t: u64) -> f64 {
        match self {
            DeltaSchedule::Constant(c) => *c,
            DeltaSchedule::InvSqrt { scale } => scale / (t.max(1) as f64).sqrt(),
        }
    }
}

/// Nadam momentum schedule: the default keeps mu_t = beta1 constant; the
/// alternative follows the Nesterov t-sequence coefficient (t_k - 1)/t_{k+1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuSchedule {
    ConstantBeta1,
    Nesterov,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    /// Step size (learning rate).
    pub eta: f64,
    /// Classical momentum coefficient.
    pub beta: f64,
    /// First-moment decay.
    pub beta1: f64,
    /// Second-moment decay.
    pub beta2: f64,
    /// AdaDelta/RMSprop decay constant.
    pub rho: f64,
    /// Small positive stabilizer.
    pub epsilon: f64,
    /// Decoupled weight-decay rate (lambda).
    pub lambda_decay: f64,
    /// L2 regularization coefficient (lambda prime), applied by the harness
    /// when augmenting an objective.
    pub lambda_l2: f64,
    /// Padam exponent, in [0, 1/2].
    pub p: f64,
    /// Decay-multiplier schedule delta_t for SGDW/AdamW.
    pub delta: DeltaSchedule,
    /// Nadam momentum schedule.
    pub nadam_mu: MuSchedule,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            eta: 0.1,
            beta: 0.9,
            beta1: 0.9,
            beta2: 0.999,
            rho: 0.9,
            epsilon: 1e-8,
            lambda_decay: 0.0,
            lambda_l2: 0.0,
            p: 0.125,
            delta: DeltaSchedule::Constant(1.0),
            nadam_mu: MuSchedule::ConstantBeta1,
        }
    }
}

impl HyperParams {
    /// Conventional defaults per algorithm: eta 0.1 for the non-adaptive
    /// methods, 0.01 for AdaGrad, 0.001 for the adaptive family; epsilon
    /// 1e-6 for AdaDelta (which has no eta at all) and 1e-8 elsewhere.
    pub fn defaults_for(algorithm: Algorithm) -> Self {
        let mut hp = HyperParams::default();
        match algorithm {
            Algorithm::Gd | Algorithm::Momentum | Algorithm::Nag | Algorithm::Sgdw => {
                hp.eta = 0.1;
            }
            Algorithm::Adagrad => hp.eta = 0.01,
            Algorithm::Adadelta => hp.epsilon = 1e-6,
            Algorithm::Rmsprop
            | Algorithm::Adam
            | Algorithm::Adamax
            | Algorithm::Nadam
            | Algorithm::Amsgrad
            | Algorithm::Padam
            | Algorithm::Adamw => hp.eta = 0.001,
        }
        hp
    }

    /// Every range violation, for config errors that list all problems at
    /// once.
    pub fn violations(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let check_unit = |errs: &mut Vec<String>, name: &str, v: f64| {
            if !(0.0..1.0).contains(&v) {
                errs.push(format!("{name} must lie in [0, 1), got {v}"));
            }
        };
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            errs.push(format!("eta must be positive and finite, got {}", self.eta));
        }
        check_unit(&mut errs, "beta", self.beta);
        check_unit(&mut errs, "beta1", self.beta1);
        check_unit(&mut errs, "beta2", self.beta2);
        check_unit(&mut errs, "rho", self.rho);
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            errs.push(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            ));
        }
        if self.lambda_decay < 0.0 {
            errs.push(format!(
                "lambda (weight decay) must be nonnegative, got {}",
                self.lambda_decay
            ));
        }
        if self.lambda_l2 < 0.0 {
            errs.push(format!(
                "lambda_l2 must be nonnegative, got {}",
                self.lambda_l2
            ));
        }
        if !(0.0..=0.5).contains(&self.p) {
            errs.push(format!("p must lie in [0, 1/2], got {}", self.p));
        }
        match self.delta {
            DeltaSchedule::Constant(c) if c <= 0.0 => {
                errs.push(format!("delta must be positive, got {c}"))
            }
            DeltaSchedule::InvSqrt { scale } if scale <= 0.0 => {
                errs.push(format!("delta scale must be positive, got {scale}"))
            }
            _ => {}
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.violations();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}
