//! Step-size selection along a ray: backtracking (Armijo) and exact
//! golden-section search.

use crate::error::{Error, Result};
use crate::numeric::ParamVector;
use crate::objectives::Objective;

/// Cap on backtracking halvings; guarantees termination on pathological
/// inputs.
pub const MAX_HALVINGS: u32 = 200;

/// Absolute tolerance on the step size for exact search.
pub const EXACT_SEARCH_TOL: f64 = 1e-8;

/// Backtracking parameters: sufficient-decrease fraction alpha in (0, 0.5),
/// shrink factor beta in (0, 1), initial step eta_init (1 by default, which
/// is the right opening step for Newton directions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    pub alpha: f64,
    pub beta: f64,
    pub eta_init: f64,
}

impl LineSearchParams {
    pub fn new(alpha: f64, beta: f64, eta_init: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::InvalidParam(format!(
                "line-search alpha must lie in (0, 0.5), got {alpha}"
            )));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParam(format!(
                "line-search beta must lie in (0, 1), got {beta}"
            )));
        }
        if eta_init <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "eta_init must be positive, got {eta_init}"
            )));
        }
        Ok(LineSearchParams {
            alpha,
            beta,
            eta_init,
        })
    }
}

impl Default for LineSearchParams {
    fn default() -> Self {
        LineSearchParams {
            alpha: 0.3,
            beta: 0.5,
            eta_init: 1.0,
        }
    }
}

/// Largest eta in {eta_init * beta^k} satisfying the Armijo condition
/// f(x + eta d) < f(x) + alpha * eta * grad f(x)^T d.
///
/// The direction must be a descent direction (grad f(x)^T d < 0).
pub fn backtracking_search(
    f: &dyn Objective,
    x: &ParamVector,
    direction: &ParamVector,
    params: &LineSearchParams,
) -> Result<f64> {
    let (fx, gx) = f.value_and_grad(x)?;
    let slope = gx.dot(direction);
    if slope >= 0.0 {
        return Err(Error::NotDescentDirection);
    }
    let mut eta = params.eta_init;
    for _ in 0..=MAX_HALVINGS {
        let trial = f.value(&x.add_scaled(eta, direction))?;
        if trial < fx + params.alpha * eta * slope {
            return Ok(eta);
        }
        eta *= params.beta;
    }
    Err(Error::LineSearchStalled {
        halvings: MAX_HALVINGS,
    })
}

/// Golden-section minimizer of eta -> f(x + eta d) over (0, eta_max].
///
/// The caller is responsible for f being unimodal along the ray within the
/// bracket. A minimizer at the eta = 0 boundary means the ray offers no
/// descent and is reported as an error.
pub fn exact_search(
    f: &dyn Objective,
    x: &ParamVector,
    direction: &ParamVector,
    bracket: (f64, f64),
) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo == 0.0 && hi > 0.0 && hi.is_finite()) {
        return Err(Error::InvalidBracket);
    }
    let phi = |eta: f64| f.value(&x.add_scaled(eta, direction));

    const INV_GOLDEN: f64 = 0.618_033_988_749_894_8; // (sqrt(5) - 1) / 2
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = phi(c)?;
    let mut fd = phi(d)?;
    while (b - a) > EXACT_SEARCH_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = phi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = phi(d)?;
        }
    }
    let eta = 0.5 * (a + b);
    if eta <= EXACT_SEARCH_TOL {
        return Err(Error::NoDescentAlongRay);
    }
    Ok(eta)
}
