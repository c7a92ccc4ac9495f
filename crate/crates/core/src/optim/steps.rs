//! The update rules. Each step consumes the current iterate and gradient
//! (NAG takes the objective, since it evaluates at its own lookahead point),
//! advances the state, and returns the next iterate.
//!
//! Conventions pinned here and relied on by the reduction tests:
//! - t increments at the start of every step, so bias correction divides by
//!   (1 - beta^t) with t >= 1.
//! - epsilon sits outside the square root for Adam/AdaMax/AMSGrad/Padam and
//!   Nadam, inside for AdaGrad/AdaDelta/RMSprop, matching each update as
//!   printed.
//! - AMSGrad maxes the raw second-moment v, not its bias-corrected form.
//! - SGDW applies decay additively as delta_t * lambda * x, decoupled from
//!   the momentum buffer, so with beta = 0 and delta = 1 it reproduces the
//!   (1 - lambda) x - eta grad weight-decay step exactly.

use crate::error::{Error, Result};
use crate::numeric::ParamVector;
use crate::objectives::Objective;
use crate::optim::{Algorithm, FeasibleBox, HyperParams, MuSchedule, OptimizerState};

fn check_inputs(state: &OptimizerState, x: &ParamVector, g: &ParamVector) -> Result<()> {
    x.check_dim(state.dim())?;
    g.check_dim(state.dim())?;
    if let Some(coordinate) = g.first_non_finite() {
        return Err(Error::NonFinite {
            context: "gradient",
            coordinate,
        });
    }
    Ok(())
}

/// Plain descent step x - eta g.
pub fn gd_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
) -> Result<ParamVector> {
    check_inputs(state, x, g)?;
    state.t += 1;
    Ok(x.add_scaled(-hp.eta, g))
}

/// Classical momentum: Z <- g + beta Z, x <- x - eta Z.
pub fn momentum_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
) -> Result<ParamVector> {
    check_inputs(state, x, g)?;
    state.t += 1;
    for (z, &gi) in state.m.as_mut_slice().iter_mut().zip(g) {
        *z = gi + hp.beta * *z;
    }
    Ok(x.add_scaled(-hp.eta, &state.m))
}

/// Optimal fixed (eta, beta) for momentum on a quadratic with eigenvalues in
/// [m, big_m]: eta = (2 / (sqrt(M) + sqrt(m)))^2, beta = ((sqrt(M) - sqrt(m))
/// / (sqrt(M) + sqrt(m)))^2.
pub fn optimal_momentum_params(m: f64, big_m: f64) -> Result<(f64, f64)> {
    if m <= 0.0 || m > big_m {
        return Err(Error::InvalidParam(format!(
            "need 0 < m <= M, got m={m}, M={big_m}"
        )));
    }
    let (sm, sbm) = (m.sqrt(), big_m.sqrt());
    let eta = (2.0 / (sbm + sm)).powi(2);
    let beta = ((sbm - sm) / (sbm + sm)).powi(2);
    Ok((eta, beta))
}

/// Nesterov's accelerated gradient. Evaluates the gradient at the lookahead
/// point y_k, then corrects y with the (t_k - 1)/t_{k+1} coefficient from
/// the recurrence t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2, t_1 = 1. The first
/// step has zero momentum coefficient and therefore equals a plain gd step.
pub fn nag_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    obj: &dyn Objective,
    hp: &HyperParams,
) -> Result<ParamVector> {
    x.check_dim(state.dim())?;
    if state.t == 0 {
        // y_1 = x_0; the correction term needs the previous iterate too.
        state.lookahead = x.clone();
        state.prev_x = x.clone();
    }
    state.t += 1;
    let g = obj.gradient(&state.lookahead)?;
    if let Some(coordinate) = g.first_non_finite() {
        return Err(Error::NonFinite {
            context: "gradient",
            coordinate,
        });
    }
    let x_new = state.lookahead.add_scaled(-hp.eta, &g);
    let t_k = state.nesterov_t;
    let t_next = (1.0 + (1.0 + 4.0 * t_k * t_k).sqrt()) / 2.0;
    let coeff = (t_k - 1.0) / t_next;
    state.lookahead = x_new.add_scaled(coeff, &x_new.sub(&state.prev_x));
    state.prev_x = x_new.clone();
    state.nesterov_t = t_next;
    Ok(x_new)
}

/// AdaGrad: v <- v + g*g, x <- x - eta g / sqrt(v + eps).
pub fn adagrad_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
) -> Result<ParamVector> {
    check_inputs(state, x, g)?;
    state.t += 1;
    let mut out = Vec::with_capacity(x.dim());
    for ((v, &gi), &xi) in state.v.as_mut_slice().iter_mut().zip(g).zip(x) {
        *v += gi * gi;
        out.push(xi - hp.eta * gi / (*v + hp.epsilon).sqrt());
    }
    Ok(ParamVector::new(out))
}

/// AdaDelta. No step size anywhere: the numerator RMS of accumulated updates
/// plays that role, lagging one step behind.
pub fn adadelta_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
) -> Result<ParamVector> {
    check_inputs(state, x, g)?;
    state.t += 1;
    let mut out = Vec::with_capacity(x.dim());
    for (((v, acc), &gi), &xi) in state
        .v
        .as_mut_slice()
        .iter_mut()
        .zip(state.delta_acc.as_mut_slice().iter_mut())
        .zip(g)
        .zip(x)
    {
        *v = hp.rho * *v + (1.0 - hp.rho) * gi * gi;
        let dx = ((*acc + hp.epsilon).sqrt() / (*v + hp.epsilon).sqrt()) * gi;
        *acc = hp.rho * *acc + (1.0 - hp.rho) * dx * dx;
        out.push(xi - dx);
    }
    Ok(ParamVector::new(out))
}

/// RMSprop: like AdaDelta's denominator with a plain eta numerator.
pub fn rmsprop_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
) -> Result<ParamVector> {
    check_inputs(state, x, g)?;
    state.t += 1;
    let mut out = Vec::with_capacity(x.dim());
    for ((v, &gi), &xi) in state.v.as_mut_slice().iter_mut().zip(g).zip(x) {
        *v = hp.rho * *v + (1.0 - hp.rho) * gi * gi;
        out.push(xi - hp.eta * gi / (*v + hp.epsilon).sqrt());
    }
    Ok(ParamVector::new(out))
}

fn adam_moments(state: &mut OptimizerState, g: &ParamVector, hp: &HyperParams) {
    for ((m, v), &gi) in state
        .m
        .as_mut_slice()
        .iter_mut()
        .zip(state.v.as_mut_slice().iter_mut())
        .zip(g)
    {
        *m = hp.beta1 * *m + (1.0 - hp.beta1) * gi;
        *v = hp.beta2 * *v + (1.0 - hp.beta2) * gi * gi;
    }
}

/// Adam: bias-corrected first/second moments, eps outside the square root.
pub fn adam_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
) -> Result<ParamVector> {
    check_inputs(state, x, g)?;
    state.t += 1;
    adam_moments(state, g, hp);
    let bc1 = 1.0 - hp.beta1.powi(state.t as i32);
    let bc2 = 1.0 - hp.beta2.powi(state.t as i32);
    let mut out = Vec::with_capacity(x.dim());
    for ((&m, &v), &xi) in state.m.iter().zip(state.v.iter()).zip(x) {
        let m_hat = m / bc1;
        let v_hat = v / bc2;
        out.push(xi - hp.eta * m_hat / (v_hat.sqrt() + hp.epsilon));
    }
    Ok(ParamVector::new(out))
}

/// AdaMax: infinity-norm statistic u <- max(beta2 u, |g|); coordinates with
/// u = 0 (an all-zero gradient history) take a zero step.
pub fn adamax_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
) -> Result<ParamVector> {
    check_inputs(state, x, g)?;
    state.t += 1;
    let bc1 = 1.0 - hp.beta1.powi(state.t as i32);
    let mut out = Vec::with_capacity(x.dim());
    for (((m, u), &gi), &xi) in state
        .m
        .as_mut_slice()
        .iter_mut()
        .zip(state.u.as_mut_slice().iter_mut())
        .zip(g)
        .zip(x)
    {
        *m = hp.beta1 * *m + (1.0 - hp.beta1) * gi;
        *u = (hp.beta2 * *u).max(gi.abs());
        let step = if *u == 0.0 { 0.0 } else { (hp.eta / bc1) * *m / *u };
        out.push(xi - step);
    }
    Ok(ParamVector::new(out))
}

/// Nadam: Adam moments with the Nesterov-flavored numerator
/// m_bar = (1 - beta1) g + mu m_t. The default schedule keeps mu = beta1.
pub fn nadam_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
) -> Result<ParamVector> {
    check_inputs(state, x, g)?;
    state.t += 1;
    adam_moments(state, g, hp);
    let mu = match hp.nadam_mu {
        MuSchedule::ConstantBeta1 => hp.beta1,
        MuSchedule::Nesterov => {
            let t_k = state.nesterov_t;
            let t_next = (1.0 + (1.0 + 4.0 * t_k * t_k).sqrt()) / 2.0;
            state.nesterov_t = t_next;
            (t_k - 1.0) / t_next
        }
    };
    let bc2 = 1.0 - hp.beta2.powi(state.t as i32);
    let mut out = Vec::with_capacity(x.dim());
    for ((&m, &v), (&gi, &xi)) in state.m.iter().zip(state.v.iter()).zip(g.iter().zip(x)) {
        let m_bar = (1.0 - hp.beta1) * gi + mu * m;
        let v_hat = v / bc2;
        out.push(xi - hp.eta * m_bar / (v_hat.sqrt() + hp.epsilon));
    }
    Ok(ParamVector::new(out))
}

/// AMSGrad: Adam statistics, but the denominator uses the running maximum
/// of v, which is componentwise nondecreasing; the update is projected onto
/// the feasible box.
pub fn amsgrad_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
    feasible: &FeasibleBox,
) -> Result<ParamVector> {
    check_inputs(state, x, g)?;
    state.t += 1;
    adam_moments(state, g, hp);
    let bc1 = 1.0 - hp.beta1.powi(state.t as i32);
    let mut out = Vec::with_capacity(x.dim());
    for (((&m, &v), vmax), &xi) in state
        .m
        .iter()
        .zip(state.v.iter())
        .zip(state.v_hat_max.as_mut_slice().iter_mut())
        .zip(x)
    {
        *vmax = vmax.max(v);
        out.push(xi - hp.eta * (m / bc1) / (vmax.sqrt() + hp.epsilon));
    }
    Ok(feasible.clamp(&ParamVector::new(out)))
}

/// Padam: AMSGrad statistics with the partially adaptive denominator
/// v_hat_max^p + eps, p in [0, 1/2]. p = 1/2 recovers AMSGrad; p = 0 leaves
/// a bias-corrected momentum step.
pub fn padam_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
    feasible: &FeasibleBox,
) -> Result<ParamVector> {
    if !(0.0..=0.5).contains(&hp.p) {
        return Err(Error::InvalidParam(format!(
            "padam exponent must lie in [0, 1/2], got {}",
            hp.p
        )));
    }
    check_inputs(state, x, g)?;
    state.t += 1;
    adam_moments(state, g, hp);
    let bc1 = 1.0 - hp.beta1.powi(state.t as i32);
    let mut out = Vec::with_capacity(x.dim());
    for (((&m, &v), vmax), &xi) in state
        .m
        .iter()
        .zip(state.v.iter())
        .zip(state.v_hat_max.as_mut_slice().iter_mut())
        .zip(x)
    {
        *vmax = vmax.max(v);
        out.push(xi - hp.eta * (m / bc1) / (vmax.powf(hp.p) + hp.epsilon));
    }
    Ok(feasible.clamp(&ParamVector::new(out)))
}

/// SGDW: momentum on the raw gradient plus decoupled decay
/// delta_t * lambda * x applied additively in the final update.
pub fn sgdw_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
) -> Result<ParamVector> {
    check_inputs(state, x, g)?;
    state.t += 1;
    let delta = hp.delta.at(state.t);
    let mut out = Vec::with_capacity(x.dim());
    for ((z, &gi), &xi) in state.m.as_mut_slice().iter_mut().zip(g).zip(x) {
        *z = gi + hp.beta * *z;
        out.push(xi - hp.eta * *z - delta * hp.lambda_decay * xi);
    }
    Ok(ParamVector::new(out))
}

/// AdamW: x <- x - delta_t (eta m_hat / (sqrt(v_hat) + eps) + lambda x).
pub fn adamw_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    g: &ParamVector,
    hp: &HyperParams,
) -> Result<ParamVector> {
    check_inputs(state, x, g)?;
    state.t += 1;
    adam_moments(state, g, hp);
    let delta = hp.delta.at(state.t);
    let bc1 = 1.0 - hp.beta1.powi(state.t as i32);
    let bc2 = 1.0 - hp.beta2.powi(state.t as i32);
    let mut out = Vec::with_capacity(x.dim());
    for ((&m, &v), &xi) in state.m.iter().zip(state.v.iter()).zip(x) {
        let adaptive = hp.eta * (m / bc1) / ((v / bc2).sqrt() + hp.epsilon);
        out.push(xi - delta * (adaptive + hp.lambda_decay * xi));
    }
    Ok(ParamVector::new(out))
}

/// Gradient source for the generic dispatcher.
pub enum GradientInput<'a> {
    Gradient(&'a ParamVector),
    Objective(&'a dyn Objective),
}

/// Dispatch one step of `state.algorithm`. NAG requires an objective input;
/// every other algorithm accepts either form. AMSGrad/Padam project onto
/// `feasible` when given, the unbounded box otherwise.
pub fn apply_step(
    state: &mut OptimizerState,
    x: &ParamVector,
    input: GradientInput<'_>,
    hp: &HyperParams,
    feasible: Option<&FeasibleBox>,
) -> Result<ParamVector> {
    if state.algorithm == Algorithm::Nag {
        return match input {
            GradientInput::Objective(obj) => nag_step(state, x, obj, hp),
            GradientInput::Gradient(_) => Err(Error::InvalidParam(
                "nag needs the objective, not a precomputed gradient".into(),
            )),
        };
    }
    let owned;
    let g = match input {
        GradientInput::Gradient(g) => g,
        GradientInput::Objective(obj) => {
            owned = obj.gradient(x)?;
            &owned
        }
    };
    let unbounded;
    let feasible = match feasible {
        Some(b) => b,
        None => {
            unbounded = FeasibleBox::unbounded(x.dim());
            &unbounded
        }
    };
    match state.algorithm {
        Algorithm::Gd => gd_step(state, x, g, hp),
        Algorithm::Momentum => momentum_step(state, x, g, hp),
        Algorithm::Nag => unreachable!("handled above"),
        Algorithm::Adagrad => adagrad_step(state, x, g, hp),
        Algorithm::Adadelta => adadelta_step(state, x, g, hp),
        Algorithm::Rmsprop => rmsprop_step(state, x, g, hp),
        Algorithm::Adam => adam_step(state, x, g, hp),
        Algorithm::Adamax => adamax_step(state, x, g, hp),
        Algorithm::Nadam => nadam_step(state, x, g, hp),
        Algorithm::Amsgrad => amsgrad_step(state, x, g, hp, feasible),
        Algorithm::Padam => padam_step(state, x, g, hp, feasible),
        Algorithm::Sgdw => sgdw_step(state, x, g, hp),
        Algorithm::Adamw => adamw_step(state, x, g, hp),
    }
}
