//! Step-size diagnostics: per-coordinate effective steps, the Gamma
//! statistic (change in inverse effective step), and running regret.
//!
//! Gamma distinguishes the methods whose effective step can only shrink
//! (SGD with fixed eta, AdaGrad, AMSGrad) from those where it can grow back
//! (Adam, RMSprop): the former keep Gamma componentwise nonnegative.

use crate::numeric::ParamVector;
use crate::optim::{Algorithm, HyperParams, OptimizerState};

#[derive(Debug, Clone)]
pub struct StepDiagnostics {
    /// Per-coordinate multiplier actually applied to the gradient.
    pub effective_step: ParamVector,
    /// Per-coordinate change of the inverse effective step between the two
    /// states.
    pub gamma: ParamVector,
    /// Running regret sum of f_t(x_t) - f_t(x*), carried through calls.
    pub regret_running: f64,
}

impl OptimizerState {
    /// The denominator-statistic over eta: sqrt(v_hat)/eta and its
    /// analogues. Zero at t = 0 (a fresh state has no step-size history).
    pub fn inverse_effective_step(&self, hp: &HyperParams) -> ParamVector {
        let dim = self.dim();
        if self.t == 0 {
            return ParamVector::zeros(dim);
        }
        let per_coord: Vec<f64> = match self.algorithm {
            Algorithm::Gd | Algorithm::Momentum | Algorithm::Nag | Algorithm::Sgdw => {
                vec![1.0 / hp.eta; dim]
            }
            Algorithm::Adagrad | Algorithm::Rmsprop => {
                self.v.iter().map(|&v| v.sqrt() / hp.eta).collect()
            }
            Algorithm::Adadelta => self
                .v
                .iter()
                .zip(self.delta_acc.iter())
                .map(|(&v, &acc)| (v + hp.epsilon).sqrt() / (acc + hp.epsilon).sqrt())
                .collect(),
            Algorithm::Adam | Algorithm::Nadam | Algorithm::Adamw => {
                let bc2 = 1.0 - hp.beta2.powi(self.t as i32);
                self.v.iter().map(|&v| (v / bc2).sqrt() / hp.eta).collect()
            }
            Algorithm::Adamax => self.u.iter().map(|&u| u / hp.eta).collect(),
            Algorithm::Amsgrad => self
                .v_hat_max
                .iter()
                .map(|&v| v.sqrt() / hp.eta)
                .collect(),
            Algorithm::Padam => self
                .v_hat_max
                .iter()
                .map(|&v| v.powf(hp.p) / hp.eta)
                .collect(),
        };
        ParamVector::new(per_coord)
    }

    /// The per-coordinate multiplier the next update would apply, epsilon
    /// included. eta itself at t = 0.
    pub fn effective_step(&self, hp: &HyperParams) -> ParamVector {
        let dim = self.dim();
        if self.t == 0 {
            return ParamVector::new(vec![hp.eta; dim]);
        }
        let per_coord: Vec<f64> = match self.algorithm {
            Algorithm::Gd | Algorithm::Momentum | Algorithm::Nag | Algorithm::Sgdw => {
                vec![hp.eta; dim]
            }
            Algorithm::Adagrad | Algorithm::Rmsprop => self
                .v
                .iter()
                .map(|&v| hp.eta / (v + hp.epsilon).sqrt())
                .collect(),
            Algorithm::Adadelta => self
                .delta_acc
                .iter()
                .zip(self.v.iter())
                .map(|(&acc, &v)| (acc + hp.epsilon).sqrt() / (v + hp.epsilon).sqrt())
                .collect(),
            Algorithm::Adam | Algorithm::Nadam | Algorithm::Adamw => {
                let bc2 = 1.0 - hp.beta2.powi(self.t as i32);
                self.v
                    .iter()
                    .map(|&v| hp.eta / ((v / bc2).sqrt() + hp.epsilon))
                    .collect()
            }
            Algorithm::Adamax => self
                .u
                .iter()
                .map(|&u| if u == 0.0 { 0.0 } else { hp.eta / u })
                .collect(),
            Algorithm::Amsgrad => self
                .v_hat_max
                .iter()
                .map(|&v| hp.eta / (v.sqrt() + hp.epsilon))
                .collect(),
            Algorithm::Padam => self
                .v_hat_max
                .iter()
                .map(|&v| hp.eta / (v.powf(hp.p) + hp.epsilon))
                .collect(),
        };
        ParamVector::new(per_coord)
    }
}

/// Diagnostics between two consecutive states. Regret accumulates onto
/// `running` when both f_t(x_t) and f_t(x*) are supplied.
pub fn step_diagnostics(
    prev: &OptimizerState,
    next: &OptimizerState,
    hp: &HyperParams,
    f_t_value: Option<f64>,
    f_star_value: Option<f64>,
    running: f64,
) -> StepDiagnostics {
    let inv_prev = prev.inverse_effective_step(hp);
    let inv_next = next.inverse_effective_step(hp);
    let gamma = inv_next.sub(&inv_prev);
    let regret_running = match (f_t_value, f_star_value) {
        (Some(ft), Some(fs)) => running + (ft - fs),
        _ => running,
    };
    StepDiagnostics {
        effective_step: next.effective_step(hp),
        gamma,
        regret_running,
    }
}

/// Spectral radius of the 2x2 momentum iteration matrix
/// [[1, -eta], [lambda, beta - eta lambda]] for one quadratic eigenvalue
/// lambda. At the optimal (eta, beta) it equals sqrt(beta) at both extreme
/// eigenvalues.
pub fn momentum_iteration_spectral_radius(lambda: f64, eta: f64, beta: f64) -> f64 {
    let trace = 1.0 + beta - eta * lambda;
    let det = beta;
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        let root = disc.sqrt();
        ((trace + root) / 2.0).abs().max(((trace - root) / 2.0).abs())
    } else {
        det.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::RngStream;
    use crate::optim::{
        adam_step, amsgrad_step, gd_step, FeasibleBox, HyperParams, OptimizerState,
    };

    #[test]
    fn amsgrad_gamma_nonnegative_over_random_steps() {
        let hp = HyperParams::default();
        let mut rng = RngStream::new(55);
        let mut s = OptimizerState::new(Algorithm::Amsgrad, 3);
        let b = FeasibleBox::unbounded(3);
        let mut x = ParamVector::zeros(3);
        for _ in 0..10_000 {
            let prev = s.clone();
            let g = rng.uniform_vector(3, -10.0, 10.0);
            x = amsgrad_step(&mut s, &x, &g, &hp, &b).unwrap();
            let d = step_diagnostics(&prev, &s, &hp, None, None, 0.0);
            assert!(d.gamma.iter().all(|&g| g >= 0.0));
        }
    }

    #[test]
    fn adam_gamma_goes_negative_after_a_spike() {
        let hp = HyperParams::default();
        let mut s = OptimizerState::new(Algorithm::Adam, 1);
        let mut x = ParamVector::zeros(1);
        let mut saw_negative = false;
        for t in 1..=200u64 {
            let prev = s.clone();
            let g = ParamVector::new(vec![if t == 1 { 10.0 } else { 0.01 }]);
            x = adam_step(&mut s, &x, &g, &hp).unwrap();
            let d = step_diagnostics(&prev, &s, &hp, None, None, 0.0);
            if d.gamma[0] < 0.0 {
                saw_negative = true;
            }
        }
        assert!(saw_negative);
    }

    #[test]
    fn fresh_state_gamma_is_first_inverse_step() {
        let hp = HyperParams::default();
        let mut s = OptimizerState::new(Algorithm::Adam, 1);
        let prev = s.clone();
        let _ = adam_step(
            &mut s,
            &ParamVector::zeros(1),
            &ParamVector::new(vec![2.0]),
            &hp,
        )
        .unwrap();
        let d = step_diagnostics(&prev, &s, &hp, None, None, 0.0);
        let v_hat = s.v[0] / (1.0 - hp.beta2);
        assert!((d.gamma[0] - v_hat.sqrt() / hp.eta).abs() < 1e-12);
        assert!(d.gamma[0] >= 0.0);
    }

    #[test]
    fn regret_accumulates_when_values_supplied() {
        let hp = HyperParams::default();
        let mut s = OptimizerState::new(Algorithm::Gd, 1);
        let prev = s.clone();
        let _ = gd_step(
            &mut s,
            &ParamVector::zeros(1),
            &ParamVector::new(vec![1.0]),
            &hp,
        )
        .unwrap();
        let d = step_diagnostics(&prev, &s, &hp, Some(3.0), Some(1.0), 10.0);
        assert_eq!(d.regret_running, 12.0);
        let d = step_diagnostics(&prev, &s, &hp, Some(3.0), None, 10.0);
        assert_eq!(d.regret_running, 10.0);
    }

    #[test]
    fn spectral_radius_at_momentum_optimum() {
        let (eta, beta) = crate::optim::optimal_momentum_params(1.0, 100.0).unwrap();
        let r1 = momentum_iteration_spectral_radius(1.0, eta, beta);
        let r2 = momentum_iteration_spectral_radius(100.0, eta, beta);
        assert!((r1 - beta.sqrt()).abs() < 1e-12);
        assert!((r2 - beta.sqrt()).abs() < 1e-12);
        // Off-optimum eta on the stiff eigenvalue is slower or unstable.
        let r_bad = momentum_iteration_spectral_radius(100.0, 0.02, beta);
        assert!(r_bad > beta.sqrt());
    }
}
