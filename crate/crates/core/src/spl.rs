//! Self-paced learning: alternating minimization over binary per-example
//! weights and model parameters on a weighted ERM objective.
//!
//! The selection rule substitutes per-example losses for the SVM slack
//! penalties: example i is kept iff C * loss_i - 1/K < 0, i.e. its loss sits
//! below the threshold 1/(C K). Ties resolve to exclusion. Annealing divides
//! K each round, growing the threshold so harder examples enter over time.

use crate::error::{Error, Result};
use crate::linesearch::{backtracking_search, LineSearchParams};
use crate::numeric::{ParamVector, RngStream};
use crate::objectives::{ErmObjective, Objective};
use crate::optim::{apply_step, Algorithm, GradientInput, HyperParams, OptimizerState};

pub const DEFAULT_ANNEAL_FACTOR: f64 = 1.3;
pub const DEFAULT_ROUNDS_CAP: usize = 25;

/// Inner fit configuration: any optimizer from the catalog, or gd with a
/// backtracking line search.
#[derive(Debug, Clone)]
pub struct InnerOptimizer {
    pub algorithm: Algorithm,
    pub hp: HyperParams,
    pub line_search: Option<LineSearchParams>,
}

impl InnerOptimizer {
    pub fn new(algorithm: Algorithm, hp: HyperParams) -> Self {
        InnerOptimizer {
            algorithm,
            hp,
            line_search: None,
        }
    }
}

/// Self-paced training state.
#[derive(Debug, Clone)]
pub struct SplState {
    /// Self-paced weight K; large K excludes hard examples.
    pub k: f64,
    /// Slack scale C in the selection rule.
    pub c: f64,
    /// Binary selection vector (entries exactly 0.0 or 1.0).
    pub v: Vec<f64>,
    /// K is divided by this each round; must exceed 1.
    pub anneal_factor: f64,
    pub rounds_completed: usize,
}

impl SplState {
    /// Initial state with the selection computed from the starting
    /// parameters' per-example losses, so the first fit already focuses on
    /// easy examples.
    pub fn init(
        obj: &ErmObjective,
        params: &ParamVector,
        c: f64,
        k: f64,
        anneal_factor: f64,
    ) -> Result<Self> {
        if anneal_factor <= 1.0 {
            return Err(Error::InvalidParam(format!(
                "anneal factor must exceed 1, got {anneal_factor}"
            )));
        }
        let losses = obj.per_example_losses(params)?;
        let v = spl_weights(&losses, c, k)?;
        Ok(SplState {
            k,
            c,
            v,
            anneal_factor,
            rounds_completed: 0,
        })
    }

    pub fn selected_count(&self) -> usize {
        self.v.iter().filter(|&&v| v == 1.0).count()
    }
}

/// Closed-form minimizer over v in {0,1}^N of sum_i (C v_i loss_i - v_i/K):
/// v_i = 1 iff C loss_i - 1/K < 0. Equality excludes.
pub fn spl_weights(per_example_losses: &[f64], c: f64, k: f64) -> Result<Vec<f64>> {
    if c <= 0.0 || k <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "spl requires C > 0 and K > 0, got C={c}, K={k}"
        )));
    }
    if let Some(&bad) = per_example_losses.iter().find(|&&l| l < 0.0 || !l.is_finite()) {
        return Err(Error::Domain(format!(
            "per-example losses must be nonnegative and finite, got {bad}"
        )));
    }
    Ok(per_example_losses
        .iter()
        .map(|&loss| if c * loss - 1.0 / k < 0.0 { 1.0 } else { 0.0 })
        .collect())
}

fn fit_inner(
    obj: &ErmObjective,
    x0: &ParamVector,
    inner: &InnerOptimizer,
    steps: usize,
) -> Result<ParamVector> {
    let mut x = x0.clone();
    if let Some(ls) = &inner.line_search {
        // gd with backtracking: monotone by construction.
        for _ in 0..steps {
            let g = obj.gradient(&x)?;
            if g.norm() == 0.0 {
                break;
            }
            let direction = g.scale(-1.0);
            let eta = backtracking_search(obj, &x, &direction, ls)?;
            x = x.add_scaled(eta, &direction);
        }
        return Ok(x);
    }
    let mut state = OptimizerState::new(inner.algorithm, obj.dim());
    for _ in 0..steps {
        x = apply_step(
            &mut state,
            &x,
            GradientInput::Objective(obj),
            &inner.hp,
            None,
        )?;
    }
    Ok(x)
}

/// One alternation round: fit parameters on the v-weighted objective,
/// recompute per-example losses, reselect v, anneal K.
pub fn spl_round(
    obj: &ErmObjective,
    params: &ParamVector,
    state: &mut SplState,
    inner: &InnerOptimizer,
    inner_steps: usize,
) -> Result<ParamVector> {
    if state.v.len() != obj.n_examples() {
        return Err(Error::DimensionMismatch {
            expected: obj.n_examples(),
            got: state.v.len(),
        });
    }
    if state.selected_count() == 0 && obj.n_examples() > 0 {
        log::warn!(
            "self-paced round {} selected no examples; fitting on the regularizer alone",
            state.rounds_completed + 1
        );
    }
    let weighted = obj.with_weights(state.v.clone())?;
    let fitted = fit_inner(&weighted, params, inner, inner_steps)?;
    let losses = obj.per_example_losses(&fitted)?;
    state.v = spl_weights(&losses, state.c, state.k)?;
    state.k /= state.anneal_factor;
    state.rounds_completed += 1;
    Ok(fitted)
}

/// Full self-paced loop: rounds of [`spl_round`] up to the cap. Returns the
/// final parameters and the per-round selected counts.
pub fn spl_train(
    obj: &ErmObjective,
    x0: &ParamVector,
    state: &mut SplState,
    inner: &InnerOptimizer,
    inner_steps: usize,
    rounds: usize,
) -> Result<(ParamVector, Vec<usize>)> {
    let mut x = x0.clone();
    let mut selected_history = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        x = spl_round(obj, &x, state, inner, inner_steps)?;
        selected_history.push(state.selected_count());
    }
    Ok((x, selected_history))
}

/// The outlier-regression fixture used by the selection tests: a clean
/// linear trend plus `n_outliers` grossly shifted points at the end.
pub fn outlier_regression_fixture(
    n_inliers: usize,
    n_outliers: usize,
    rng: &mut RngStream,
) -> crate::objectives::Dataset {
    let mut rows = Vec::with_capacity(n_inliers + n_outliers);
    for _ in 0..n_inliers {
        let x = rng.uniform(-2.0, 2.0);
        let noise = 0.05 * rng.normal();
        rows.push((vec![x], 2.0 * x + noise));
    }
    for _ in 0..n_outliers {
        let x = rng.uniform(-2.0, 2.0);
        rows.push((vec![x], 2.0 * x + 50.0));
    }
    crate::objectives::Dataset::regression(&rows).expect("nonempty rows")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::RegularizationTerm;
    use crate::objectives::{LossKind, ModelKind};

    /// Exhaustive minimization over v in {0,1}^N of the linear-in-v part of
    /// the self-paced objective, ties broken toward exclusion.
    fn brute_force_weights(losses: &[f64], c: f64, k: f64) -> Vec<f64> {
        let n = losses.len();
        assert!(n <= 20);
        let mut best_mask = 0usize;
        let mut best = f64::INFINITY;
        for mask in 0..(1usize << n) {
            let mut val = 0.0;
            for (i, &l) in losses.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    val += c * l - 1.0 / k;
                }
            }
            let better = val < best
                || (val == best && (mask.count_ones() < best_mask.count_ones()));
            if better {
                best = val;
                best_mask = mask;
            }
        }
        (0..n)
            .map(|i| if best_mask >> i & 1 == 1 { 1.0 } else { 0.0 })
            .collect()
    }

    #[test]
    fn weights_examples() {
        // Threshold 1/(CK) -> infinity as K -> 0+ selects everything.
        let v = spl_weights(&[5.0, 100.0, 0.01], 1.0, 1e-12).unwrap();
        assert_eq!(v, vec![1.0, 1.0, 1.0]);

        let v = spl_weights(&[0.1, 0.5, 2.0], 1.0, 1.0).unwrap();
        assert_eq!(v, vec![1.0, 1.0, 0.0]);

        let v = spl_weights(&[0.1, 0.5, 2.0], 1.0, 5.0).unwrap();
        assert_eq!(v, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn weights_match_brute_force_on_random_instances() {
        let mut rng = RngStream::new(42);
        for _ in 0..200 {
            let n = 1 + rng.uniform_usize(12);
            let losses: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 3.0)).collect();
            let c = rng.uniform(0.1, 3.0);
            let k = rng.uniform(0.1, 5.0);
            assert_eq!(
                spl_weights(&losses, c, k).unwrap(),
                brute_force_weights(&losses, c, k),
            );
        }
    }

    #[test]
    fn tie_breaks_to_exclusion() {
        // loss exactly at the threshold: C*loss - 1/K = 0 excludes.
        let v = spl_weights(&[0.5], 1.0, 2.0).unwrap();
        assert_eq!(v, vec![0.0]);
        assert_eq!(brute_force_weights(&[0.5], 1.0, 2.0), vec![0.0]);
    }

    #[test]
    fn threshold_growth_never_drops_examples() {
        let mut rng = RngStream::new(7);
        for _ in 0..100 {
            let losses: Vec<f64> = (0..10).map(|_| rng.uniform(0.0, 2.0)).collect();
            let k = rng.uniform(0.5, 4.0);
            let before = spl_weights(&losses, 1.0, k).unwrap();
            let after = spl_weights(&losses, 1.0, k / 1.7).unwrap();
            for (b, a) in before.iter().zip(&after) {
                assert!(a >= b, "annealing removed a selected example");
            }
        }
    }

    fn fixture_objective(rng: &mut RngStream) -> ErmObjective {
        ErmObjective::new(
            ModelKind::LinearRegression,
            outlier_regression_fixture(20, 3, rng),
            LossKind::Mse,
            RegularizationTerm::none(),
        )
        .unwrap()
    }

    #[test]
    fn outliers_excluded_in_round_one_and_admitted_later() {
        let mut rng = RngStream::new(99);
        let obj = fixture_objective(&mut rng);
        let x0 = ParamVector::zeros(1);
        // Threshold 1/(CK) = 25: inlier mse losses at w=0 are <= (2*2)^2 =
        // 16, outliers about 50^2.
        let mut state = SplState::init(&obj, &x0, 1.0, 0.04, 1000.0).unwrap();
        assert_eq!(state.selected_count(), 20);
        assert_eq!(&state.v[20..], &[0.0, 0.0, 0.0]);

        let inner = InnerOptimizer {
            algorithm: Algorithm::Gd,
            hp: HyperParams {
                eta: 0.05,
                ..HyperParams::default()
            },
            line_search: None,
        };
        let fitted = spl_round(&obj, &x0, &mut state, &inner, 200).unwrap();
        // Round-1 selection (post-fit) still excludes all three outliers.
        assert_eq!(&state.v[20..], &[0.0, 0.0, 0.0]);
        assert_eq!(state.selected_count(), 20);

        // The fit tracked the inlier slope, not the outlier-shifted one.
        assert!((fitted[0] - 2.0).abs() < 0.2, "slope {}", fitted[0]);

        // After a huge anneal step the threshold exceeds every loss: all in.
        let _ = spl_round(&obj, &fitted, &mut state, &inner, 10).unwrap();
        assert_eq!(state.selected_count(), 23);
    }

    #[test]
    fn all_ones_weights_is_plain_erm() {
        let mut rng = RngStream::new(3);
        let obj = fixture_objective(&mut rng);
        let ones = obj.with_weights(vec![1.0; 23]).unwrap();
        let x = ParamVector::new(vec![1.5]);
        assert_eq!(obj.value(&x).unwrap(), ones.value(&x).unwrap());
    }

    #[test]
    fn inner_fit_with_backtracking_is_monotone() {
        let mut rng = RngStream::new(5);
        let obj = fixture_objective(&mut rng);
        let weighted = obj
            .with_weights(spl_weights(&obj.per_example_losses(&ParamVector::zeros(1)).unwrap(), 1.0, 0.04).unwrap())
            .unwrap();
        let ls = LineSearchParams::default();
        let mut x = ParamVector::zeros(1);
        let mut last = weighted.value(&x).unwrap();
        for _ in 0..50 {
            let g = weighted.gradient(&x).unwrap();
            if g.norm() < 1e-12 {
                break;
            }
            let d = g.scale(-1.0);
            let eta = backtracking_search(&weighted, &x, &d, &ls).unwrap();
            x = x.add_scaled(eta, &d);
            let now = weighted.value(&x).unwrap();
            assert!(now <= last, "objective increased {last} -> {now}");
            last = now;
        }
    }

    #[test]
    fn empty_selection_proceeds_on_regularizer() {
        let mut rng = RngStream::new(11);
        let obj = ErmObjective::new(
            ModelKind::LinearRegression,
            outlier_regression_fixture(5, 0, &mut rng),
            LossKind::Mse,
            RegularizationTerm::l2(1.0).unwrap(),
        )
        .unwrap();
        let mut state = SplState {
            k: 1e9, // threshold ~ 0: nothing selected
            c: 1.0,
            v: vec![0.0; 5],
            anneal_factor: 2.0,
            rounds_completed: 0,
        };
        let inner = InnerOptimizer::new(Algorithm::Gd, HyperParams::default());
        // Fit shrinks parameters toward zero under the regularizer alone.
        let fitted = spl_round(&obj, &ParamVector::new(vec![3.0]), &mut state, &inner, 50)
            .unwrap();
        assert!(fitted[0].abs() < 0.1);
    }
}
