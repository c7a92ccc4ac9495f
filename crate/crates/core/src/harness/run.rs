//! Trajectory runner and multi-config comparison.

use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::linesearch::backtracking_search;
use crate::losses::RegularizationTerm;
use crate::numeric::{substream, ParamVector, RngStream};
use crate::objectives::{
    dataset, AdversarialStream, ErmObjective, Objective, QuadraticForm, Rosenbrock,
    SaddleBenchmark,
};
use crate::optim::{
    apply_step, minibatch_gradient, stochastic_gradient, FeasibleBox, GradientInput,
    MinibatchSampler, OptimizerState,
};
use crate::spl::{spl_round, InnerOptimizer, SplState};

use super::config::{BatchSpec, ExperimentConfig, InitSpec, ObjectiveSpec};
use super::trace::{StopReason, Trace, TraceRecord};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: Trace,
    pub final_x: ParamVector,
    pub final_f: f64,
    pub final_grad_norm: f64,
    pub steps_taken: u64,
    /// The step at which the tolerance fired, when the stop reason is
    /// tolerance.
    pub steps_to_tolerance: Option<u64>,
    /// Cumulative regret against the best fixed point, for stream
    /// objectives.
    pub cumulative_regret: Option<f64>,
}

enum BuiltObjective {
    Static(Box<dyn Objective>),
    Erm(ErmObjective),
    Stream(AdversarialStream),
}

fn build_objective(spec: &ObjectiveSpec) -> Result<BuiltObjective> {
    Ok(match spec {
        ObjectiveSpec::QuadraticDiag(diag) => {
            BuiltObjective::Static(Box::new(QuadraticForm::from_diag(diag)))
        }
        ObjectiveSpec::HyperbolicSaddle => {
            BuiltObjective::Static(Box::new(SaddleBenchmark::Hyperbolic))
        }
        ObjectiveSpec::MonkeySaddle => BuiltObjective::Static(Box::new(SaddleBenchmark::Monkey)),
        ObjectiveSpec::Rosenbrock { a, b } => {
            BuiltObjective::Static(Box::new(Rosenbrock::new(*a, *b)?))
        }
        ObjectiveSpec::Erm {
            dataset: path,
            model,
            loss,
            lambda_l2,
            classes,
        } => {
            let table = dataset::load_table(path)?;
            let data = match model {
                crate::objectives::ModelKind::LinearRegression => table.into_regression()?,
                crate::objectives::ModelKind::LogisticRegression => {
                    table.into_classification(Some(2))?
                }
                crate::objectives::ModelKind::SoftmaxClassifier => {
                    table.into_classification(*classes)?
                }
            };
            BuiltObjective::Erm(ErmObjective::new(
                *model,
                data,
                *loss,
                RegularizationTerm::l2(*lambda_l2)?,
            )?)
        }
        ObjectiveSpec::AdversarialStream { big, period } => {
            BuiltObjective::Stream(AdversarialStream::new(*big, *period)?)
        }
    })
}

fn initial_point(config: &ExperimentConfig, dim: usize) -> Result<ParamVector> {
    match &config.run.init {
        InitSpec::Explicit(x0) => {
            let x = ParamVector::new(x0.clone());
            x.check_dim(dim)?;
            Ok(x)
        }
        InitSpec::RandomNormal { dim: d } => {
            if *d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: *d,
                });
            }
            let mut rng = RngStream::substream(config.run.seed, substream::INIT);
            Ok(rng.normal_vector(dim))
        }
    }
}

struct Recorder {
    records: Vec<TraceRecord>,
    iterate_rows: Vec<String>,
    dump_every: u64,
    log_every: u64,
    record_timing: bool,
    started: Instant,
}

impl Recorder {
    fn new(config: &ExperimentConfig) -> Self {
        Recorder {
            records: Vec::new(),
            iterate_rows: Vec::new(),
            dump_every: config.run.dump_every,
            log_every: config.run.log_every,
            record_timing: config.run.record_timing,
            started: Instant::now(),
        }
    }

    fn should_log(&self, step: u64) -> bool {
        step % self.log_every == 0
    }

    fn push(&mut self, step: u64, f: f64, grad_norm: f64, eff: &ParamVector, x: &ParamVector) {
        if self.records.last().map_or(false, |r| r.step == step) {
            return; // exactly one record per logged step
        }
        let elapsed_ns = if self.record_timing {
            self.started.elapsed().as_nanos() as u64
        } else {
            0
        };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &s in eff {
            lo = lo.min(s);
            hi = hi.max(s);
        }
        self.records.push(TraceRecord {
            step,
            f,
            grad_norm,
            step_min: lo,
            step_max: hi,
            elapsed_ns,
        });
        if self.dump_every > 0 && step % self.dump_every == 0 {
            let coords: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            self.iterate_rows.push(format!("{step},{}", coords.join(",")));
        }
    }

    fn finish(
        self,
        stop_reason: StopReason,
        config: &ExperimentConfig,
        dim: usize,
    ) -> Result<Trace> {
        let trace = Trace {
            records: self.records,
            stop_reason,
        };
        if let Some(path) = &config.output.trace {
            trace.write_csv(path)?;
            if self.dump_every > 0 {
                let header: Vec<String> = (0..dim).map(|i| format!("x_{i}")).collect();
                let mut text = format!("step,{}\n", header.join(","));
                for row in &self.iterate_rows {
                    text.push_str(row);
                    text.push('\n');
                }
                std::fs::write(iterate_dump_path(path), text)?;
            }
        }
        Ok(trace)
    }
}

/// Sibling file for full-iterate dumps: `trace.csv` -> `trace.iterates.csv`.
pub fn iterate_dump_path(trace_path: &Path) -> std::path::PathBuf {
    trace_path.with_extension("iterates.csv")
}

/// Runs one configured trajectory to tolerance, budget, or divergence. The
/// trace is persisted when an output path is configured; aborts still leave
/// a valid trace file whose terminal comment carries the stop reason.
pub fn run_trajectory(config: &ExperimentConfig) -> Result<RunOutcome> {
    match build_objective(&config.objective)? {
        BuiltObjective::Stream(stream) => run_stream(config, &stream),
        BuiltObjective::Static(obj) => run_static(config, obj.as_ref(), None),
        BuiltObjective::Erm(erm) => {
            let erm_clone = erm.clone();
            run_static(config, &erm, Some(&erm_clone))
        }
    }
}

fn run_static(
    config: &ExperimentConfig,
    obj: &dyn Objective,
    erm: Option<&ErmObjective>,
) -> Result<RunOutcome> {
    let dim = obj.dim();
    let mut x = initial_point(config, dim)?;
    let feasible = config
        .optimizer
        .feasible_box
        .as_ref()
        .map(|(lo, hi)| FeasibleBox::new(ParamVector::new(lo.clone()), ParamVector::new(hi.clone())))
        .transpose()?;
    let mut state = OptimizerState::new(config.optimizer.algorithm, dim);
    let hp = &config.optimizer.hp;

    let mut sample_rng = RngStream::substream(config.run.seed, substream::SAMPLING);
    let mut noise_rng = RngStream::substream(config.run.seed, substream::NOISE);
    let mut sampler = match config.run.batch {
        BatchSpec::MiniBatch(b) => {
            let erm = erm.ok_or_else(|| {
                Error::InvalidParam("mini-batch sampling needs an erm objective".into())
            })?;
            Some(MinibatchSampler::new(erm.n_examples(), b)?)
        }
        _ => None,
    };

    let f_star = config.run.f_star.or(config.objective.known_f_star());
    let tol_met = |f: f64, grad_norm: f64| -> bool {
        let by_grad = config.run.grad_tol.map_or(false, |tol| grad_norm <= tol);
        let by_gap = match (config.run.f_gap_tol, f_star) {
            (Some(tol), Some(fs)) => f - fs <= tol,
            _ => false,
        };
        by_grad || by_gap
    };

    let mut recorder = Recorder::new(config);
    let (mut f, mut g) = obj.value_and_grad(&x)?;
    recorder.push(0, f, g.norm(), &state.effective_step(hp), &x);

    let mut stop = StopReason::Budget;
    let mut steps_taken = 0u64;
    let mut steps_to_tolerance = None;

    if tol_met(f, g.norm()) && config.run.max_steps > 0 {
        stop = StopReason::Tolerance;
        steps_to_tolerance = Some(0);
    } else {
        for t in 1..=config.run.max_steps {
            // Gradient used for the step; the trace always reports the full
            // objective at the new iterate.
            let step_result = if config.optimizer.algorithm.needs_objective() {
                apply_step(&mut state, &x, GradientInput::Objective(obj), hp, feasible.as_ref())
            } else if let Some(ls) = &config.optimizer.line_search {
                let direction = g.scale(-1.0);
                backtracking_search(obj, &x, &direction, ls)
                    .map(|eta| x.add_scaled(eta, &direction))
                    .map(|next| {
                        state.t += 1;
                        next
                    })
            } else {
                let mut step_g = match (config.run.batch, erm) {
                    (BatchSpec::Full, _) => g.clone(),
                    (BatchSpec::MiniBatch(_), Some(erm)) => minibatch_gradient(
                        erm,
                        &x,
                        sampler.as_mut().expect("sampler built"),
                        &mut sample_rng,
                    )?,
                    (BatchSpec::Stochastic, Some(erm)) => {
                        stochastic_gradient(erm, &x, &mut sample_rng)?
                    }
                    _ => g.clone(),
                };
                if config.run.noise_sigma > 0.0 {
                    let noise = noise_rng.normal_vector(dim);
                    step_g = step_g.add_scaled(config.run.noise_sigma, &noise);
                }
                apply_step(&mut state, &x, GradientInput::Gradient(&step_g), hp, feasible.as_ref())
            };
            steps_taken = t;
            match step_result {
                Ok(next) => x = next,
                Err(Error::NonFinite { .. }) => {
                    recorder.push(t, f64::NAN, f64::NAN, &state.effective_step(hp), &x);
                    stop = StopReason::Diverged;
                    break;
                }
                Err(other) => return Err(other),
            }

            match obj.value_and_grad(&x) {
                Ok((fv, gv)) => {
                    f = fv;
                    g = gv;
                }
                Err(Error::NonFinite { .. }) | Err(Error::Domain(_)) => {
                    recorder.push(t, f64::NAN, f64::NAN, &state.effective_step(hp), &x);
                    stop = StopReason::Diverged;
                    break;
                }
                Err(other) => return Err(other),
            }
            let grad_norm = g.norm();
            if !f.is_finite() || !x.is_finite() {
                recorder.push(t, f, grad_norm, &state.effective_step(hp), &x);
                stop = StopReason::Diverged;
                break;
            }
            if tol_met(f, grad_norm) {
                recorder.push(t, f, grad_norm, &state.effective_step(hp), &x);
                stop = StopReason::Tolerance;
                steps_to_tolerance = Some(t);
                break;
            }
            if recorder.should_log(t) || t == config.run.max_steps {
                recorder.push(t, f, grad_norm, &state.effective_step(hp), &x);
            }
        }
    }

    let final_grad_norm = g.norm();
    let trace = recorder.finish(stop, config, dim)?;
    Ok(RunOutcome {
        trace,
        final_x: x,
        final_f: f,
        final_grad_norm,
        steps_taken,
        steps_to_tolerance,
        cumulative_regret: None,
    })
}

fn run_stream(config: &ExperimentConfig, stream: &AdversarialStream) -> Result<RunOutcome> {
    let dim = stream.dim();
    let mut x = initial_point(config, dim)?;
    // Online runs need a bounded comparator set; default to [-1, 1].
    let feasible = match &config.optimizer.feasible_box {
        Some((lo, hi)) => {
            FeasibleBox::new(ParamVector::new(lo.clone()), ParamVector::new(hi.clone()))?
        }
        None => FeasibleBox::symmetric(dim, 1.0)?,
    };
    x = feasible.clamp(&x);
    let mut state = OptimizerState::new(config.optimizer.algorithm, dim);
    let hp = &config.optimizer.hp;

    let mut recorder = Recorder::new(config);
    let mut regret = 0.0;
    let mut f = stream.value_at(1, &x);
    let mut grad_norm = 0.0;
    recorder.push(0, f, stream.grad_at(1, &x).norm(), &state.effective_step(hp), &x);

    for t in 1..=config.run.max_steps {
        f = stream.value_at(t, &x);
        regret += f - stream.comparator_value(t);
        let g = stream.grad_at(t, &x);
        grad_norm = g.norm();
        x = apply_step(&mut state, &x, GradientInput::Gradient(&g), hp, Some(&feasible))?;
        if recorder.should_log(t) || t == config.run.max_steps {
            recorder.push(t, f, grad_norm, &state.effective_step(hp), &x);
        }
    }

    let steps_taken = config.run.max_steps;
    let trace = recorder.finish(StopReason::Budget, config, dim)?;
    Ok(RunOutcome {
        trace,
        final_x: x,
        final_f: f,
        final_grad_norm: grad_norm,
        steps_taken,
        steps_to_tolerance: None,
        cumulative_regret: Some(regret),
    })
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub optimizer: String,
    pub objective: String,
    pub steps_to_tolerance: Option<u64>,
    pub final_f: f64,
    pub final_grad_norm: f64,
    pub stop_reason: StopReason,
}

/// Runs every config (concurrently when the parallel feature is on; each
/// run owns its state, RNG, and trace file) and tabulates the outcomes in
/// input order. With `shared_objective` set, all configs must name the same
/// objective and seed.
pub fn compare(configs: &[ExperimentConfig], shared_objective: bool) -> Result<Vec<ComparisonRow>> {
    if shared_objective {
        if let Some(first) = configs.first() {
            for c in &configs[1..] {
                if c.objective != first.objective {
                    return Err(Error::InvalidParam(
                        "shared-objective comparison: objectives differ".into(),
                    ));
                }
                if c.run.seed != first.run.seed {
                    return Err(Error::InvalidParam(
                        "shared-objective comparison: seeds differ".into(),
                    ));
                }
            }
        }
    }
    let run_one = |config: &ExperimentConfig| -> Result<ComparisonRow> {
        let outcome = run_trajectory(config)?;
        Ok(ComparisonRow {
            optimizer: config.optimizer.algorithm.name().to_string(),
            objective: config.objective.name().to_string(),
            steps_to_tolerance: outcome.steps_to_tolerance,
            final_f: outcome.final_f,
            final_grad_norm: outcome.final_grad_norm,
            stop_reason: outcome.trace.stop_reason,
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        configs.par_iter().map(run_one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        configs.iter().map(run_one).collect()
    }
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out =
        String::from("optimizer,objective,steps_to_tolerance,final_f,final_grad_norm,stop_reason\n");
    for r in rows {
        let steps = r
            .steps_to_tolerance
            .map(|s| s.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.optimizer, r.objective, steps, r.final_f, r.final_grad_norm, r.stop_reason
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Self-paced training runner
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SplRoundRecord {
    pub round: usize,
    pub k: f64,
    pub selected: usize,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct SplRunOutcome {
    pub final_x: ParamVector,
    pub rounds: Vec<SplRoundRecord>,
}

/// Self-paced training over an erm objective, driven by the [spl] section.
pub fn run_spl(config: &ExperimentConfig) -> Result<SplRunOutcome> {
    let spl_spec = config
        .spl
        .as_ref()
        .ok_or_else(|| Error::InvalidParam("spl run needs an [spl] section".into()))?;
    let erm = match build_objective(&config.objective)? {
        BuiltObjective::Erm(erm) => erm,
        _ => {
            return Err(Error::InvalidParam(
                "spl training needs an erm objective".into(),
            ))
        }
    };
    let mut x = initial_point(config, erm.dim())?;
    let inner = InnerOptimizer {
        algorithm: config.optimizer.algorithm,
        hp: config.optimizer.hp.clone(),
        line_search: config.optimizer.line_search,
    };
    let mut state = SplState::init(&erm, &x, spl_spec.c, spl_spec.k, spl_spec.anneal_factor)?;
    let mut rounds = Vec::with_capacity(spl_spec.rounds);
    for round in 1..=spl_spec.rounds {
        x = spl_round(&erm, &x, &mut state, &inner, spl_spec.inner_steps)?;
        rounds.push(SplRoundRecord {
            round,
            k: state.k,
            selected: state.selected_count(),
            objective: erm.value(&x)?,
        });
    }
    if let Some(path) = &config.output.trace {
        let mut text = String::from("round,k,selected,objective\n");
        for r in &rounds {
            text.push_str(&format!("{},{},{},{}\n", r.round, r.k, r.selected, r.objective));
        }
        std::fs::write(path, text)?;
    }
    Ok(SplRunOutcome { final_x: x, rounds })
}
