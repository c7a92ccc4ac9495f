//! Experiment configuration: TOML-style `key = value` sections, strictly
//! validated. Unknown keys are errors, and validation reports every
//! violation at once rather than stopping at the first.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::linesearch::LineSearchParams;
use crate::objectives::{LossKind, ModelKind};
use crate::optim::{Algorithm, DeltaSchedule, HyperParams, MuSchedule};

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveSpec {
    QuadraticDiag(Vec<f64>),
    HyperbolicSaddle,
    MonkeySaddle,
    Rosenbrock { a: f64, b: f64 },
    Erm {
        dataset: PathBuf,
        model: ModelKind,
        loss: LossKind,
        lambda_l2: f64,
        classes: Option<usize>,
    },
    AdversarialStream { big: f64, period: u64 },
}

impl ObjectiveSpec {
    /// Known optimum value, where one exists, for f-gap stopping.
    pub fn known_f_star(&self) -> Option<f64> {
        match self {
            ObjectiveSpec::QuadraticDiag(diag) if diag.iter().all(|&d| d >= 0.0) => Some(0.0),
            ObjectiveSpec::Rosenbrock { .. } => Some(0.0),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveSpec::QuadraticDiag(_) => "quadratic_diag",
            ObjectiveSpec::HyperbolicSaddle => "hyperbolic_saddle",
            ObjectiveSpec::MonkeySaddle => "monkey_saddle",
            ObjectiveSpec::Rosenbrock { .. } => "rosenbrock",
            ObjectiveSpec::Erm { .. } => "erm",
            ObjectiveSpec::AdversarialStream { .. } => "adversarial_stream",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSpec {
    pub algorithm: Algorithm,
    pub hp: HyperParams,
    pub feasible_box: Option<(Vec<f64>, Vec<f64>)>,
    /// gd only: choose the step size by backtracking each iteration.
    pub line_search: Option<LineSearchParams>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Explicit(Vec<f64>),
    RandomNormal { dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchSpec {
    Full,
    MiniBatch(usize),
    Stochastic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub max_steps: u64,
    pub grad_tol: Option<f64>,
    pub f_gap_tol: Option<f64>,
    pub f_star: Option<f64>,
    pub seed: u64,
    pub init: InitSpec,
    pub batch: BatchSpec,
    pub noise_sigma: f64,
    pub log_every: u64,
    pub dump_every: u64,
    pub record_timing: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplSpec {
    pub k: f64,
    pub c: f64,
    pub anneal_factor: f64,
    pub rounds: usize,
    pub inner_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub objective: ObjectiveSpec,
    pub optimizer: OptimizerSpec,
    pub run: RunSpec,
    pub output: OutputSpec,
    pub spl: Option<SplSpec>,
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Section<'a> {
    name: &'a str,
    table: &'a toml::Table,
    errs: Vec<String>,
}

impl<'a> Section<'a> {
    fn new(name: &'a str, table: &'a toml::Table) -> Self {
        Section {
            name,
            table,
            errs: Vec::new(),
        }
    }

    fn check_keys(&mut self, allowed: &[&str]) {
        let allowed: BTreeSet<&str> = allowed.iter().copied().collect();
        for key in self.table.keys() {
            if !allowed.contains(key.as_str()) {
                self.errs
                    .push(format!("[{}] unknown key '{}'", self.name, key));
            }
        }
    }

    fn f64(&mut self, key: &str) -> Option<f64> {
        match self.table.get(key) {
            None => None,
            Some(toml::Value::Float(f)) => Some(*f),
            Some(toml::Value::Integer(i)) => Some(*i as f64),
            Some(other) => {
                self.errs.push(format!(
                    "[{}] {} must be a number, got {}",
                    self.name,
                    key,
                    other.type_str()
                ));
                None
            }
        }
    }

    fn u64(&mut self, key: &str) -> Option<u64> {
        match self.table.get(key) {
            None => None,
            Some(toml::Value::Integer(i)) if *i >= 0 => Some(*i as u64),
            Some(other) => {
                self.errs.push(format!(
                    "[{}] {} must be a nonnegative integer, got {other}",
                    self.name, key
                ));
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.table.get(key) {
            None => None,
            Some(toml::Value::String(s)) => Some(s.clone()),
            Some(other) => {
                self.errs.push(format!(
                    "[{}] {} must be a string, got {}",
                    self.name,
                    key,
                    other.type_str()
                ));
                None
            }
        }
    }

    fn bool(&mut self, key: &str) -> Option<bool> {
        match self.table.get(key) {
            None => None,
            Some(toml::Value::Boolean(b)) => Some(*b),
            Some(other) => {
                self.errs.push(format!(
                    "[{}] {} must be a boolean, got {}",
                    self.name,
                    key,
                    other.type_str()
                ));
                None
            }
        }
    }

    fn f64_array(&mut self, key: &str) -> Option<Vec<f64>> {
        match self.table.get(key) {
            None => None,
            Some(toml::Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        toml::Value::Float(f) => out.push(*f),
                        toml::Value::Integer(i) => out.push(*i as f64),
                        other => {
                            self.errs.push(format!(
                                "[{}] {} must contain only numbers, got {}",
                                self.name,
                                key,
                                other.type_str()
                            ));
                            return None;
                        }
                    }
                }
                Some(out)
            }
            Some(other) => {
                self.errs.push(format!(
                    "[{}] {} must be an array, got {}",
                    self.name,
                    key,
                    other.type_str()
                ));
                None
            }
        }
    }
}

fn parse_objective(section: &mut Section<'_>) -> Option<ObjectiveSpec> {
    section.check_keys(&[
        "kind", "diag", "a", "b", "dataset", "model", "loss", "lambda_l2", "classes", "big",
        "period",
    ]);
    let kind = match section.string("kind") {
        Some(k) => k,
        None => {
            section.errs.push("[objective] missing key 'kind'".into());
            return None;
        }
    };
    match kind.as_str() {
        "quadratic_diag" => {
            let diag = section.f64_array("diag");
            match diag {
                Some(d) if !d.is_empty() => Some(ObjectiveSpec::QuadraticDiag(d)),
                _ => {
                    section
                        .errs
                        .push("[objective] quadratic_diag needs a nonempty 'diag' array".into());
                    None
                }
            }
        }
        "hyperbolic_saddle" => Some(ObjectiveSpec::HyperbolicSaddle),
        "monkey_saddle" => Some(ObjectiveSpec::MonkeySaddle),
        "rosenbrock" => {
            let a = section.f64("a").unwrap_or(1.0);
            let b = section.f64("b").unwrap_or(100.0);
            if b <= 0.0 {
                section
                    .errs
                    .push(format!("[objective] rosenbrock requires b > 0, got {b}"));
                return None;
            }
            Some(ObjectiveSpec::Rosenbrock { a, b })
        }
        "erm" => {
            let dataset = section.string("dataset").map(PathBuf::from);
            let model = section.string("model").and_then(|m| match m.as_str() {
                "linear" => Some(ModelKind::LinearRegression),
                "logistic" => Some(ModelKind::LogisticRegression),
                "softmax" => Some(ModelKind::SoftmaxClassifier),
                other => {
                    section
                        .errs
                        .push(format!("[objective] unknown model '{other}'"));
                    None
                }
            });
            let loss = section.string("loss").and_then(|l| match l.as_str() {
                "mse" => Some(LossKind::Mse),
                "mae" => Some(LossKind::Mae),
                "msle" => Some(LossKind::Msle),
                "bce" => Some(LossKind::Bce),
                "cce" => Some(LossKind::Cce),
                other => {
                    section
                        .errs
                        .push(format!("[objective] unknown loss '{other}'"));
                    None
                }
            });
            let lambda_l2 = section.f64("lambda_l2").unwrap_or(0.0);
            if lambda_l2 < 0.0 {
                section
                    .errs
                    .push(format!("[objective] lambda_l2 must be nonnegative, got {lambda_l2}"));
            }
            let classes = section.u64("classes").map(|c| c as usize);
            match (dataset, model, loss) {
                (Some(dataset), Some(model), Some(loss)) if lambda_l2 >= 0.0 => {
                    Some(ObjectiveSpec::Erm {
                        dataset,
                        model,
                        loss,
                        lambda_l2,
                        classes,
                    })
                }
                _ => {
                    if !section.table.contains_key("dataset") {
                        section
                            .errs
                            .push("[objective] erm needs 'dataset'".into());
                    }
                    if !section.table.contains_key("model") {
                        section.errs.push("[objective] erm needs 'model'".into());
                    }
                    if !section.table.contains_key("loss") {
                        section.errs.push("[objective] erm needs 'loss'".into());
                    }
                    None
                }
            }
        }
        "adversarial_stream" => {
            let big = section.f64("big").unwrap_or(101.0);
            let period = section.u64("period").unwrap_or(3);
            if big <= 0.0 || period == 0 {
                section.errs.push(
                    "[objective] adversarial_stream needs big > 0 and period >= 1".into(),
                );
                return None;
            }
            Some(ObjectiveSpec::AdversarialStream { big, period })
        }
        other => {
            section
                .errs
                .push(format!("[objective] unknown kind '{other}'"));
            None
        }
    }
}

fn parse_optimizer(section: &mut Section<'_>) -> Option<OptimizerSpec> {
    section.check_keys(&[
        "kind",
        "eta",
        "beta",
        "beta1",
        "beta2",
        "rho",
        "epsilon",
        "lambda",
        "lambda_l2",
        "p",
        "delta",
        "delta_schedule",
        "nadam_schedule",
        "line_search",
        "ls_alpha",
        "ls_beta",
        "ls_eta_init",
        "box_lower",
        "box_upper",
    ]);
    let algorithm = match section.string("kind") {
        Some(k) => match Algorithm::from_name(&k) {
            Ok(a) => a,
            Err(_) => {
                section
                    .errs
                    .push(format!("[optimizer] unknown kind '{k}'"));
                return None;
            }
        },
        None => {
            section.errs.push("[optimizer] missing key 'kind'".into());
            return None;
        }
    };

    let mut hp = HyperParams::defaults_for(algorithm);
    if let Some(v) = section.f64("eta") {
        hp.eta = v;
    }
    if let Some(v) = section.f64("beta") {
        hp.beta = v;
    }
    if let Some(v) = section.f64("beta1") {
        hp.beta1 = v;
    }
    if let Some(v) = section.f64("beta2") {
        hp.beta2 = v;
    }
    if let Some(v) = section.f64("rho") {
        hp.rho = v;
    }
    if let Some(v) = section.f64("epsilon") {
        hp.epsilon = v;
    }
    if let Some(v) = section.f64("lambda") {
        hp.lambda_decay = v;
    }
    if let Some(v) = section.f64("lambda_l2") {
        hp.lambda_l2 = v;
    }
    if let Some(v) = section.f64("p") {
        hp.p = v;
    }
    let delta_value = section.f64("delta").unwrap_or(1.0);
    hp.delta = match section.string("delta_schedule").as_deref() {
        None | Some("constant") => DeltaSchedule::Constant(delta_value),
        Some("inv_sqrt") => DeltaSchedule::InvSqrt { scale: delta_value },
        Some(other) => {
            section
                .errs
                .push(format!("[optimizer] unknown delta_schedule '{other}'"));
            DeltaSchedule::Constant(delta_value)
        }
    };
    hp.nadam_mu = match section.string("nadam_schedule").as_deref() {
        None | Some("beta1") => MuSchedule::ConstantBeta1,
        Some("nesterov") => MuSchedule::Nesterov,
        Some(other) => {
            section
                .errs
                .push(format!("[optimizer] unknown nadam_schedule '{other}'"));
            MuSchedule::ConstantBeta1
        }
    };
    for violation in hp.violations() {
        section.errs.push(format!("[optimizer] {violation}"));
    }

    let line_search = if section.bool("line_search").unwrap_or(false) {
        if algorithm != Algorithm::Gd {
            section
                .errs
                .push("[optimizer] line_search is only supported for gd".into());
        }
        let alpha = section.f64("ls_alpha").unwrap_or(0.3);
        let beta = section.f64("ls_beta").unwrap_or(0.5);
        let eta_init = section.f64("ls_eta_init").unwrap_or(1.0);
        match LineSearchParams::new(alpha, beta, eta_init) {
            Ok(ls) => Some(ls),
            Err(e) => {
                section.errs.push(format!("[optimizer] {e}"));
                None
            }
        }
    } else {
        None
    };

    let feasible_box = match (section.f64_array("box_lower"), section.f64_array("box_upper")) {
        (Some(lo), Some(hi)) => {
            if lo.len() != hi.len() {
                section
                    .errs
                    .push("[optimizer] box_lower and box_upper must have equal length".into());
                None
            } else if lo.iter().zip(&hi).any(|(l, h)| l > h) {
                section
                    .errs
                    .push("[optimizer] box_lower must not exceed box_upper".into());
                None
            } else {
                Some((lo, hi))
            }
        }
        (None, None) => None,
        _ => {
            section
                .errs
                .push("[optimizer] box_lower and box_upper must be given together".into());
            None
        }
    };

    Some(OptimizerSpec {
        algorithm,
        hp,
        feasible_box,
        line_search,
    })
}

fn parse_run(section: &mut Section<'_>, objective: Option<&ObjectiveSpec>) -> Option<RunSpec> {
    section.check_keys(&[
        "max_steps",
        "grad_tol",
        "f_gap_tol",
        "f_star",
        "seed",
        "x0",
        "dim",
        "batch",
        "noise_sigma",
        "log_every",
        "dump_every",
        "record_timing",
    ]);
    let max_steps = section.u64("max_steps").unwrap_or(1000);
    let grad_tol = section.f64("grad_tol");
    let f_gap_tol = section.f64("f_gap_tol");
    let f_star = section.f64("f_star");
    for (name, v) in [("grad_tol", grad_tol), ("f_gap_tol", f_gap_tol)] {
        if let Some(v) = v {
            if v <= 0.0 {
                section
                    .errs
                    .push(format!("[run] {name} must be positive, got {v}"));
            }
        }
    }
    if f_gap_tol.is_some()
        && f_star.is_none()
        && objective.map_or(true, |o| o.known_f_star().is_none())
    {
        section.errs.push(
            "[run] f_gap_tol needs 'f_star' when the objective has no known optimum".into(),
        );
    }
    let seed = section.u64("seed").unwrap_or(0);

    let init = match (section.f64_array("x0"), section.u64("dim")) {
        (Some(x0), None) if !x0.is_empty() => Some(InitSpec::Explicit(x0)),
        (None, Some(dim)) if dim >= 1 => Some(InitSpec::RandomNormal { dim: dim as usize }),
        (Some(_), Some(_)) => {
            section
                .errs
                .push("[run] give either 'x0' or 'dim', not both".into());
            None
        }
        _ => {
            section
                .errs
                .push("[run] needs 'x0' (explicit start) or 'dim' (random start)".into());
            None
        }
    };

    let batch = match section.table.get("batch") {
        None => Some(BatchSpec::Full),
        Some(toml::Value::String(s)) => match s.as_str() {
            "full" => Some(BatchSpec::Full),
            "stochastic" => Some(BatchSpec::Stochastic),
            other => {
                section.errs.push(format!(
                    "[run] batch must be \"full\", \"stochastic\", or a positive integer, got '{other}'"
                ));
                None
            }
        },
        Some(toml::Value::Integer(i)) if *i >= 1 => Some(BatchSpec::MiniBatch(*i as usize)),
        Some(other) => {
            section.errs.push(format!(
                "[run] batch must be \"full\", \"stochastic\", or a positive integer, got {other}"
            ));
            None
        }
    };
    if !matches!(batch, Some(BatchSpec::Full)) {
        if let Some(o) = objective {
            if !matches!(o, ObjectiveSpec::Erm { .. }) {
                section
                    .errs
                    .push("[run] mini-batch and stochastic sampling need an erm objective".into());
            }
        }
    }

    let noise_sigma = section.f64("noise_sigma").unwrap_or(0.0);
    if noise_sigma < 0.0 {
        section
            .errs
            .push(format!("[run] noise_sigma must be nonnegative, got {noise_sigma}"));
    }
    let log_every = section.u64("log_every").unwrap_or(1);
    if log_every == 0 {
        section.errs.push("[run] log_every must be >= 1".into());
    }
    let dump_every = section.u64("dump_every").unwrap_or(0);
    let record_timing = section.bool("record_timing").unwrap_or(false);

    Some(RunSpec {
        max_steps,
        grad_tol,
        f_gap_tol,
        f_star,
        seed,
        init: init?,
        batch: batch?,
        noise_sigma,
        log_every,
        dump_every,
        record_timing,
    })
}

fn parse_spl(section: &mut Section<'_>) -> Option<SplSpec> {
    section.check_keys(&["k", "c", "anneal_factor", "rounds", "inner_steps"]);
    let k = section.f64("k").unwrap_or(1.0);
    let c = section.f64("c").unwrap_or(1.0);
    let anneal_factor = section
        .f64("anneal_factor")
        .unwrap_or(crate::spl::DEFAULT_ANNEAL_FACTOR);
    let rounds = section
        .u64("rounds")
        .unwrap_or(crate::spl::DEFAULT_ROUNDS_CAP as u64) as usize;
    let inner_steps = section.u64("inner_steps").unwrap_or(100) as usize;
    if k <= 0.0 || c <= 0.0 {
        section
            .errs
            .push("[spl] k and c must be positive".into());
    }
    if anneal_factor <= 1.0 {
        section
            .errs
            .push(format!("[spl] anneal_factor must exceed 1, got {anneal_factor}"));
    }
    Some(SplSpec {
        k,
        c,
        anneal_factor,
        rounds,
        inner_steps,
    })
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let root: toml::Table = text
        .parse()
        .map_err(|e| Error::Parse(format!("config syntax: {e}")))?;

    let mut errs = Vec::new();
    let known_sections = ["objective", "optimizer", "run", "output", "spl"];
    for key in root.keys() {
        if !known_sections.contains(&key.as_str()) {
            errs.push(format!("unknown section [{key}]"));
        }
    }

    let get_table = |name: &str, errs: &mut Vec<String>| -> Option<toml::Table> {
        match root.get(name) {
            Some(toml::Value::Table(t)) => Some(t.clone()),
            Some(_) => {
                errs.push(format!("[{name}] must be a table"));
                None
            }
            None => None,
        }
    };

    let objective = match get_table("objective", &mut errs) {
        Some(t) => {
            let mut s = Section::new("objective", &t);
            let spec = parse_objective(&mut s);
            errs.extend(s.errs);
            spec
        }
        None => {
            errs.push("missing [objective] section".into());
            None
        }
    };

    let optimizer = match get_table("optimizer", &mut errs) {
        Some(t) => {
            let mut s = Section::new("optimizer", &t);
            let spec = parse_optimizer(&mut s);
            errs.extend(s.errs);
            spec
        }
        None => {
            errs.push("missing [optimizer] section".into());
            None
        }
    };

    let run = match get_table("run", &mut errs) {
        Some(t) => {
            let mut s = Section::new("run", &t);
            let spec = parse_run(&mut s, objective.as_ref());
            errs.extend(s.errs);
            spec
        }
        None => {
            errs.push("missing [run] section".into());
            None
        }
    };

    let output = match get_table("output", &mut errs) {
        Some(t) => {
            let mut s = Section::new("output", &t);
            s.check_keys(&["trace"]);
            let trace = s.string("trace").map(PathBuf::from);
            errs.extend(s.errs);
            OutputSpec { trace }
        }
        None => OutputSpec::default(),
    };

    let spl = match get_table("spl", &mut errs) {
        Some(t) => {
            let mut s = Section::new("spl", &t);
            let spec = parse_spl(&mut s);
            errs.extend(s.errs);
            spec
        }
        None => None,
    };

    // Cross-section constraints.
    if let (Some(opt), Some(run)) = (&optimizer, &run) {
        if opt.algorithm == Algorithm::Nag
            && (run.batch != BatchSpec::Full || run.noise_sigma > 0.0)
        {
            errs.push("nag evaluates at its lookahead point and supports only full-batch, noise-free runs".into());
        }
        if opt.line_search.is_some() && (run.batch != BatchSpec::Full || run.noise_sigma > 0.0) {
            errs.push("line_search needs the exact objective: full batch, no noise".into());
        }
        if let (Some((lo, _)), InitSpec::Explicit(x0)) = (&opt.feasible_box, &run.init) {
            if lo.len() != x0.len() {
                errs.push("box dimension does not match x0".into());
            }
        }
    }
    if let (Some(obj), Some(run)) = (&objective, &run) {
        let obj_dim = match obj {
            ObjectiveSpec::QuadraticDiag(d) => Some(d.len()),
            ObjectiveSpec::HyperbolicSaddle
            | ObjectiveSpec::MonkeySaddle
            | ObjectiveSpec::Rosenbrock { .. } => Some(2),
            ObjectiveSpec::AdversarialStream { .. } => Some(1),
            ObjectiveSpec::Erm { .. } => None, // known after the dataset loads
        };
        if let (Some(d), InitSpec::Explicit(x0)) = (obj_dim, &run.init) {
            if x0.len() != d {
                errs.push(format!(
                    "[run] x0 has dimension {}, objective needs {d}",
                    x0.len()
                ));
            }
        }
    }

    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    let config = ExperimentConfig {
        objective: objective.expect("validated"),
        optimizer: optimizer.expect("validated"),
        run: run.expect("validated"),
        output,
        spl,
    };
    echo_defaults(&config);
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

fn echo_defaults(config: &ExperimentConfig) {
    let hp = &config.optimizer.hp;
    log::info!(
        "optimizer {}: eta={} beta={} beta1={} beta2={} rho={} epsilon={} lambda={} p={} delta_t(1)={}",
        config.optimizer.algorithm,
        hp.eta,
        hp.beta,
        hp.beta1,
        hp.beta2,
        hp.rho,
        hp.epsilon,
        hp.lambda_decay,
        hp.p,
        hp.delta.at(1),
    );
    log::info!(
        "run: objective={} max_steps={} seed={} batch={:?} log_every={}",
        config.objective.name(),
        config.run.max_steps,
        config.run.seed,
        config.run.batch,
        config.run.log_every,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[objective]
kind = "quadratic_diag"
diag = [1.0, 100.0]

[optimizer]
kind = "adam"

[run]
x0 = [1.0, 1.0]
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse_config_str(MINIMAL).unwrap();
        assert_eq!(c.optimizer.algorithm, Algorithm::Adam);
        assert_eq!(c.optimizer.hp.eta, 0.001);
        assert_eq!(c.optimizer.hp.beta2, 0.999);
        assert_eq!(c.run.max_steps, 1000);
        assert_eq!(c.run.log_every, 1);
        assert_eq!(c.run.batch, BatchSpec::Full);
    }

    #[test]
    fn adagrad_and_padam_paper_defaults() {
        let text = MINIMAL.replace("\"adam\"", "\"adagrad\"");
        let c = parse_config_str(&text).unwrap();
        assert_eq!(c.optimizer.hp.eta, 0.01);
        let text = MINIMAL.replace("\"adam\"", "\"padam\"");
        let c = parse_config_str(&text).unwrap();
        assert_eq!(c.optimizer.hp.p, 0.125);
    }

    #[test]
    fn out_of_range_padam_exponent_rejected() {
        let text = MINIMAL.replace("kind = \"adam\"", "kind = \"padam\"\np = 0.7");
        let err = parse_config_str(&text).unwrap_err();
        match err {
            Error::Config(errs) => {
                assert!(errs.iter().any(|e| e.contains("p must lie in [0, 1/2]")))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn beta2_range_is_half_open() {
        let text = MINIMAL.replace("kind = \"adam\"", "kind = \"adam\"\nbeta2 = 1.0");
        assert!(parse_config_str(&text).is_err());
    }

    #[test]
    fn every_violation_is_listed() {
        let text = r#"
[objective]
kind = "quadratic_diag"
diag = [1.0]
bogus = 1

[optimizer]
kind = "adam"
eta = -2.0
beta1 = 1.5

[run]
x0 = [1.0]
log_every = 0
"#;
        let err = parse_config_str(text).unwrap_err();
        match err {
            Error::Config(errs) => {
                assert!(errs.iter().any(|e| e.contains("unknown key 'bogus'")));
                assert!(errs.iter().any(|e| e.contains("eta")));
                assert!(errs.iter().any(|e| e.contains("beta1")));
                assert!(errs.iter().any(|e| e.contains("log_every")));
                assert!(errs.len() >= 4, "{errs:?}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_caught() {
        let text = MINIMAL.replace("x0 = [1.0, 1.0]", "x0 = [1.0, 1.0, 1.0]");
        assert!(parse_config_str(&text).is_err());
    }

    #[test]
    fn nag_minibatch_combination_rejected() {
        let text = r#"
[objective]
kind = "quadratic_diag"
diag = [1.0, 2.0]

[optimizer]
kind = "nag"

[run]
x0 = [1.0, 1.0]
batch = 2
"#;
        assert!(parse_config_str(text).is_err());
    }
}
