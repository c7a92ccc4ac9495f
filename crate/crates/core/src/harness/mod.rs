//! Experiment harness: validated configs, deterministic trajectory runs,
//! CSV traces, optimizer comparisons, and gradient checks.

mod config;
mod gradcheck;
mod run;
mod trace;

pub use config::{
    parse_config, parse_config_str, BatchSpec, ExperimentConfig, InitSpec, ObjectiveSpec,
    OptimizerSpec, OutputSpec, RunSpec, SplSpec,
};
pub use gradcheck::{
    all_pass, check_objective, run_gradcheck, AdapterObjective, GradCheckReport, GRADCHECK_TOL,
};
pub use run::{
    compare, comparison_csv, iterate_dump_path, run_spl, run_trajectory, ComparisonRow,
    RunOutcome, SplRoundRecord, SplRunOutcome,
};
pub use trace::{StopReason, Trace, TraceRecord, TRACE_HEADER};
