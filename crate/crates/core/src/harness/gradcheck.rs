//! Gradient checks over every shipped analytic gradient: losses, model
//! families, and benchmark objectives, each compared against the central
//! finite-difference oracle at seeded sample points.

use crate::error::Result;
use crate::losses::{self, RegularizationTerm};
use crate::numeric::{
    finite_diff_gradient, relative_error, DenseMatrix, ParamVector, RngStream, DEFAULT_GRAD_STEP,
};
use crate::objectives::{
    Dataset, ErmObjective, LossKind, ModelKind, Objective, QuadraticForm, Rosenbrock,
    SaddleBenchmark,
};

/// Max relative error a gradient implementation may show against the
/// finite-difference oracle.
pub const GRADCHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub name: String,
    pub points: usize,
    pub max_rel_err: f64,
    /// Coordinate with the largest deviation at the worst point.
    pub worst_coordinate: usize,
    pub pass: bool,
}

impl GradCheckReport {
    pub fn line(&self) -> String {
        format!(
            "{:<28} points={:<4} max_rel_err={:.3e} worst_coord={} {}",
            self.name,
            self.points,
            self.max_rel_err,
            self.worst_coordinate,
            if self.pass { "ok" } else { "FAIL" }
        )
    }
}

/// Objective with independently supplied value and analytic gradient;
/// lets the checker cover formulas that are not `Objective`s themselves.
pub struct AdapterObjective {
    dim: usize,
    value_fn: Box<dyn Fn(&[f64]) -> f64 + Sync>,
    grad_fn: Box<dyn Fn(&[f64]) -> Vec<f64> + Sync>,
}

impl AdapterObjective {
    pub fn new(
        dim: usize,
        value_fn: impl Fn(&[f64]) -> f64 + Sync + 'static,
        grad_fn: impl Fn(&[f64]) -> Vec<f64> + Sync + 'static,
    ) -> Self {
        AdapterObjective {
            dim,
            value_fn: Box::new(value_fn),
            grad_fn: Box::new(grad_fn),
        }
    }
}

impl Objective for AdapterObjective {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &ParamVector) -> Result<f64> {
        x.check_dim(self.dim)?;
        Ok((self.value_fn)(x.as_slice()))
    }
    fn gradient(&self, x: &ParamVector) -> Result<ParamVector> {
        x.check_dim(self.dim)?;
        Ok(ParamVector::new((self.grad_fn)(x.as_slice())))
    }
}

type Sampler = Box<dyn Fn(&mut RngStream) -> ParamVector + Sync>;

struct CheckCase {
    name: &'static str,
    objective: Box<dyn Objective>,
    sampler: Sampler,
}

/// Checks one objective's analytic gradient at `points` sampled points;
/// exposed so tests can run fixtures (like deliberately biased gradients)
/// through the same machinery.
pub fn check_objective(
    name: &str,
    obj: &dyn Objective,
    sample: impl Fn(&mut RngStream) -> ParamVector,
    points: usize,
    rng: &mut RngStream,
) -> Result<GradCheckReport> {
    let mut max_rel_err = 0.0f64;
    let mut worst_coordinate = 0;
    for _ in 0..points {
        let x = sample(rng);
        let analytic = obj.gradient(&x)?;
        let fd = finite_diff_gradient(obj, &x, DEFAULT_GRAD_STEP)?;
        let err = relative_error(&analytic, &fd);
        if err > max_rel_err {
            max_rel_err = err;
            let diff = analytic.sub(&fd);
            worst_coordinate = (0..diff.dim())
                .max_by(|&a, &b| diff[a].abs().total_cmp(&diff[b].abs()))
                .unwrap_or(0);
        }
    }
    Ok(GradCheckReport {
        name: name.to_string(),
        points,
        max_rel_err,
        worst_coordinate,
        pass: max_rel_err <= GRADCHECK_TOL,
    })
}

fn simplex_sampler(dim: usize) -> Sampler {
    Box::new(move |rng| {
        let raw: Vec<f64> = (0..dim).map(|_| rng.uniform(0.05, 1.0)).collect();
        let sum: f64 = raw.iter().sum();
        ParamVector::new(raw.into_iter().map(|v| v / sum).collect())
    })
}

fn box_sampler(dim: usize, lo: f64, hi: f64) -> Sampler {
    Box::new(move |rng| rng.uniform_vector(dim, lo, hi))
}

fn loss_cases(seed: u64) -> Vec<CheckCase> {
    let mut rng = RngStream::substream(seed, 100);
    let n = 4;
    let y_reg: Vec<f64> = (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect();
    let y_pos: Vec<f64> = y_reg.iter().map(|v| v.abs() + 0.1).collect();
    let y_bin: Vec<f64> = (0..n).map(|_| rng.uniform_usize(2) as f64).collect();
    let classes: Vec<usize> = (0..n).map(|_| rng.uniform_usize(3)).collect();
    let kl_p: Vec<f64> = {
        let raw: Vec<f64> = (0..4).map(|_| rng.uniform(0.1, 1.0)).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / s).collect()
    };

    let mut cases: Vec<CheckCase> = Vec::new();

    let y = y_reg.clone();
    let yg = y_reg.clone();
    cases.push(CheckCase {
        name: "loss:mse",
        objective: Box::new(AdapterObjective::new(
            n,
            move |p| losses::mse(&y, p).unwrap().value,
            move |p| losses::mse(&yg, p).unwrap().grad,
        )),
        sampler: box_sampler(n, -2.0, 2.0),
    });

    // MAE gradient is piecewise constant; sample away from the kinks.
    let y = y_reg.clone();
    let yg = y_reg.clone();
    let y_kink = y_reg.clone();
    cases.push(CheckCase {
        name: "loss:mae",
        objective: Box::new(AdapterObjective::new(
            n,
            move |p| losses::mae(&y, p).unwrap().value,
            move |p| losses::mae(&yg, p).unwrap().grad,
        )),
        sampler: Box::new(move |rng| {
            loop {
                let p = rng.uniform_vector(n, -2.0, 2.0);
                if y_kink.iter().zip(&p).all(|(yi, pi)| (yi - pi).abs() > 1e-2) {
                    return p;
                }
            }
        }),
    });

    let y = y_pos.clone();
    let yg = y_pos.clone();
    cases.push(CheckCase {
        name: "loss:msle",
        objective: Box::new(AdapterObjective::new(
            n,
            move |p| losses::msle(&y, p).unwrap().value,
            move |p| losses::msle(&yg, p).unwrap().grad,
        )),
        sampler: box_sampler(n, 0.1, 3.0),
    });

    let y = y_bin.clone();
    let yg = y_bin.clone();
    cases.push(CheckCase {
        name: "loss:bce",
        objective: Box::new(AdapterObjective::new(
            n,
            move |p| losses::bce(&y, p).unwrap().value,
            move |p| losses::bce(&yg, p).unwrap().grad,
        )),
        sampler: box_sampler(n, 0.05, 0.95),
    });

    // CCE over the raw (unvalidated) formula: finite differences perturb the
    // rows off the simplex, where the clamped-log form still extends
    // smoothly.
    let cls = classes.clone();
    let clsg = classes.clone();
    cases.push(CheckCase {
        name: "loss:cce",
        objective: Box::new(AdapterObjective::new(
            n * 3,
            move |flat| losses::cce_unchecked(&cls, flat, 3).0,
            move |flat| losses::cce_unchecked(&clsg, flat, 3).1,
        )),
        sampler: Box::new(move |rng| {
            let mut flat = Vec::with_capacity(n * 3);
            for _ in 0..n {
                let raw: Vec<f64> = (0..3).map(|_| rng.uniform(0.1, 1.0)).collect();
                let s: f64 = raw.iter().sum();
                flat.extend(raw.into_iter().map(|v| v / s));
            }
            ParamVector::new(flat)
        }),
    });

    let p = kl_p.clone();
    let pg = kl_p.clone();
    cases.push(CheckCase {
        name: "loss:kl",
        objective: Box::new(AdapterObjective::new(
            4,
            move |q| losses::kl_unchecked(&p, q).0,
            move |q| losses::kl_unchecked(&pg, q).1,
        )),
        sampler: simplex_sampler(4),
    });

    cases.push(CheckCase {
        name: "loss:l2_regularizer",
        objective: Box::new(AdapterObjective::new(
            4,
            |x| {
                losses::l2_regularizer(&ParamVector::new(x.to_vec()), 0.7)
                    .unwrap()
                    .0
            },
            |x| {
                losses::l2_regularizer(&ParamVector::new(x.to_vec()), 0.7)
                    .unwrap()
                    .1
                    .into_vec()
            },
        )),
        sampler: box_sampler(4, -3.0, 3.0),
    });

    cases
}

fn erm_cases(seed: u64) -> Vec<CheckCase> {
    let mut rng = RngStream::substream(seed, 101);

    let reg_rows: Vec<(Vec<f64>, f64)> = (0..16)
        .map(|_| {
            let x = vec![rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
            let y = 1.5 * x[0] - 0.5 * x[1] + 0.1 * rng.normal();
            (x, y)
        })
        .collect();
    let pos_rows: Vec<(Vec<f64>, f64)> = reg_rows
        .iter()
        .map(|(x, y)| (x.clone(), y.abs() + 0.5))
        .collect();
    let bin_rows: Vec<(Vec<f64>, usize)> = (0..16)
        .map(|_| {
            let x = vec![rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)];
            let label = usize::from(x[0] - x[1] > 0.0);
            (x, label)
        })
        .collect();
    let multi_rows: Vec<(Vec<f64>, usize)> = (0..16)
        .map(|_| {
            let x = vec![rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)];
            let label = if x[0] > 0.5 {
                0
            } else if x[1] > 0.0 {
                1
            } else {
                2
            };
            (x, label)
        })
        .collect();

    let make = |model, rows_reg: Option<&[(Vec<f64>, f64)]>, rows_cls: Option<(&[(Vec<f64>, usize)], usize)>, loss, lambda| {
        let data = match (rows_reg, rows_cls) {
            (Some(r), None) => Dataset::regression(r).unwrap(),
            (None, Some((r, c))) => Dataset::classification(r, c).unwrap(),
            _ => unreachable!(),
        };
        ErmObjective::new(model, data, loss, RegularizationTerm::l2(lambda).unwrap()).unwrap()
    };

    let mse = make(ModelKind::LinearRegression, Some(&reg_rows), None, LossKind::Mse, 0.2);
    let mae = make(ModelKind::LinearRegression, Some(&reg_rows), None, LossKind::Mae, 0.0);
    let mae_data = mae.clone();
    let msle = make(ModelKind::LinearRegression, Some(&pos_rows), None, LossKind::Msle, 0.0);
    let bce = make(
        ModelKind::LogisticRegression,
        None,
        Some((&bin_rows, 2)),
        LossKind::Bce,
        0.1,
    );
    let cce = make(
        ModelKind::SoftmaxClassifier,
        None,
        Some((&multi_rows, 3)),
        LossKind::Cce,
        0.0,
    );
    let cce_dim = cce.dim();

    vec![
        CheckCase {
            name: "erm:linear+mse",
            objective: Box::new(mse),
            sampler: box_sampler(2, -1.0, 1.0),
        },
        CheckCase {
            name: "erm:linear+mae",
            objective: Box::new(mae),
            sampler: Box::new(move |rng| loop {
                let w = rng.uniform_vector(2, -1.0, 1.0);
                let residual_ok = mae_data
                    .per_example_losses(&w)
                    .map(|ls| ls.iter().all(|&l| l > 1e-2))
                    .unwrap_or(false);
                if residual_ok {
                    return w;
                }
            }),
        },
        CheckCase {
            name: "erm:linear+msle",
            // Keep predictions inside the msle domain (> -1).
            objective: Box::new(msle),
            sampler: box_sampler(2, -0.3, 0.3),
        },
        CheckCase {
            name: "erm:logistic+bce",
            objective: Box::new(bce),
            sampler: box_sampler(2, -1.5, 1.5),
        },
        CheckCase {
            name: "erm:softmax+cce",
            objective: Box::new(cce),
            sampler: box_sampler(cce_dim, -1.0, 1.0),
        },
    ]
}

fn benchmark_cases() -> Vec<CheckCase> {
    vec![
        CheckCase {
            name: "objective:quadratic_diag",
            objective: Box::new(QuadraticForm::from_diag(&[1.0, 100.0])),
            sampler: box_sampler(2, -2.0, 2.0),
        },
        CheckCase {
            name: "objective:quadratic_dense",
            objective: Box::new(
                QuadraticForm::new(
                    DenseMatrix::new(3, 3, vec![4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0])
                        .unwrap(),
                    Some(ParamVector::new(vec![1.0, -1.0, 0.5])),
                )
                .unwrap(),
            ),
            sampler: box_sampler(3, -2.0, 2.0),
        },
        CheckCase {
            name: "objective:hyperbolic_saddle",
            objective: Box::new(SaddleBenchmark::Hyperbolic),
            sampler: box_sampler(2, -2.0, 2.0),
        },
        CheckCase {
            name: "objective:monkey_saddle",
            objective: Box::new(SaddleBenchmark::Monkey),
            sampler: box_sampler(2, -2.0, 2.0),
        },
        CheckCase {
            name: "objective:rosenbrock",
            objective: Box::new(Rosenbrock::new(1.0, 100.0).unwrap()),
            sampler: box_sampler(2, -2.0, 2.0),
        },
        CheckCase {
            name: "erm:linear+mse(1 feature)",
            objective: Box::new(
                ErmObjective::new(
                    ModelKind::LinearRegression,
                    Dataset::regression(&[(vec![1.0], 2.0), (vec![-2.0], -4.5), (vec![0.5], 1.2)])
                        .unwrap(),
                    LossKind::Mse,
                    RegularizationTerm::none(),
                )
                .unwrap(),
            ),
            sampler: box_sampler(1, -3.0, 3.0),
        },
    ]
}

/// Runs the whole registry. Deterministic for a given (points, seed).
pub fn run_gradcheck(points: usize, seed: u64) -> Result<Vec<GradCheckReport>> {
    let mut cases = benchmark_cases();
    cases.extend(loss_cases(seed));
    cases.extend(erm_cases(seed));

    let run_case = |(i, case): (usize, &CheckCase)| -> Result<GradCheckReport> {
        let mut rng = RngStream::substream(seed, 200 + i as u64);
        check_objective(case.name, case.objective.as_ref(), &case.sampler, points, &mut rng)
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cases.par_iter().enumerate().map(run_case).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cases.iter().enumerate().map(run_case).collect()
    }
}

pub fn all_pass(reports: &[GradCheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
