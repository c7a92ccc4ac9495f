//! Convergence traces: per-iteration records with a fixed CSV layout
//! `step,f,grad_norm,step_min,step_max,elapsed_ns`, terminated by a
//! `# stop_reason=<reason>` comment line so every file carries its outcome.

use std::fmt;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "step,f,grad_norm,step_min,step_max,elapsed_ns";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    Budget,
    Diverged,
    UserInterrupt,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Tolerance => "tolerance",
            StopReason::Budget => "budget",
            StopReason::Diverged => "diverged",
            StopReason::UserInterrupt => "user-interrupt",
        }
    }

    pub fn from_str(s: &str) -> Result<Self> {
        match s {
            "tolerance" => Ok(StopReason::Tolerance),
            "budget" => Ok(StopReason::Budget),
            "diverged" => Ok(StopReason::Diverged),
            "user-interrupt" => Ok(StopReason::UserInterrupt),
            other => Err(Error::Parse(format!("unknown stop reason '{other}'"))),
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub step: u64,
    pub f: f64,
    pub grad_norm: f64,
    /// Smallest per-coordinate effective step at this iterate.
    pub step_min: f64,
    /// Largest per-coordinate effective step at this iterate.
    pub step_max: f64,
    pub elapsed_ns: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub stop_reason: StopReason,
}

impl Trace {
    pub fn csv_string(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 2));
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.step, r.f, r.grad_norm, r.step_min, r.step_max, r.elapsed_ns
            ));
        }
        out.push_str(&format!("# stop_reason={}\n", self.stop_reason));
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.csv_string().as_bytes())?;
        Ok(())
    }

    pub fn parse_csv(text: &str) -> Result<Trace> {
        let mut records = Vec::new();
        let mut stop_reason = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line == TRACE_HEADER {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(reason) = rest.strip_prefix("stop_reason=") {
                    stop_reason = Some(StopReason::from_str(reason)?);
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(Error::Parse(format!(
                    "trace line {}: expected 6 fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse_f = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("trace line {}: {e}", lineno + 1)))
            };
            let parse_u = |s: &str| {
                s.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("trace line {}: {e}", lineno + 1)))
            };
            records.push(TraceRecord {
                step: parse_u(fields[0])?,
                f: parse_f(fields[1])?,
                grad_norm: parse_f(fields[2])?,
                step_min: parse_f(fields[3])?,
                step_max: parse_f(fields[4])?,
                elapsed_ns: parse_u(fields[5])?,
            });
        }
        let stop_reason = stop_reason
            .ok_or_else(|| Error::Parse("trace has no terminal stop_reason record".into()))?;
        Ok(Trace {
            records,
            stop_reason,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trace {
        Trace {
            records: vec![
                TraceRecord {
                    step: 0,
                    f: 50.5,
                    grad_norm: 100.0,
                    step_min: 0.001,
                    step_max: 0.001,
                    elapsed_ns: 0,
                },
                TraceRecord {
                    step: 1,
                    f: 12.25,
                    grad_norm: 40.0,
                    step_min: 0.0005,
                    step_max: 0.01,
                    elapsed_ns: 0,
                },
            ],
            stop_reason: StopReason::Budget,
        }
    }

    #[test]
    fn round_trips_through_csv() {
        let t = sample();
        let parsed = Trace::parse_csv(&t.csv_string()).unwrap();
        assert_eq!(t, parsed);
    }

    #[test]
    fn missing_stop_reason_is_an_error() {
        let text = format!("{TRACE_HEADER}\n0,1.0,1.0,0.1,0.1,0\n");
        assert!(Trace::parse_csv(&text).is_err());
    }

    #[test]
    fn non_finite_values_survive_round_trip() {
        let t = Trace {
            records: vec![TraceRecord {
                step: 3,
                f: f64::INFINITY,
                grad_norm: f64::NAN,
                step_min: 0.0,
                step_max: 0.0,
                elapsed_ns: 0,
            }],
            stop_reason: StopReason::Diverged,
        };
        let parsed = Trace::parse_csv(&t.csv_string()).unwrap();
        assert_eq!(parsed.records[0].f, f64::INFINITY);
        assert!(parsed.records[0].grad_norm.is_nan());
        assert_eq!(parsed.stop_reason, StopReason::Diverged);
    }
}
