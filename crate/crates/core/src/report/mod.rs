//! Script front end: parse a script, run its commands, collect the results
//! in a [`Report`] and write it as JSON.
//!
//! JSON output is canonical: keys are sorted, floats are rounded to 10
//! significant digits and no timing is recorded, so the same script and
//! settings always give the same bytes.

mod repro;
mod run;
mod script;

pub use repro::{
    cusp, repro_example, surface, surface_refined_stratification, surface_whitney_stratification,
};
pub use script::{parse_script, Command, CommandKind, Example, Script};

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::cone::{ConeError, Engine, EngineConfig, NumericConfig, PuiseuxConfig};
use crate::semialg::SemialgError;
use crate::strat::StratError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Parse(#[from] SemialgError),
    #[error(transparent)]
    Strat(#[from] StratError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("{message}")]
    Command { message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid report: {0}")]
    Json(#[from] serde_json::Error),
}

/// Knobs shared by every command of a run. All of them are written to the
/// report so a run can be repeated from its output alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub seed: u64,
    pub eps_schedule: Vec<f64>,
    pub budget: usize,
    pub engines: Vec<Engine>,
    pub grid: usize,
    /// Cap on correction exponents in the series engine.
    pub trunc: i64,
    pub whitney_seeds: Vec<u64>,
    pub lift_pairs: usize,
    pub strict: bool,
}

impl Default for Settings {
    fn default() -> Self {
        let numeric = NumericConfig::default();
        Settings {
            seed: 0,
            eps_schedule: numeric.schedule,
            budget: numeric.budget,
            engines: EngineConfig::default().engines,
            grid: 16,
            trunc: PuiseuxConfig::default().max_exponent,
            whitney_seeds: vec![1, 2, 3],
            lift_pairs: 1000,
            strict: false,
        }
    }
}

impl Settings {
    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            engines: self.engines.clone(),
            numeric: NumericConfig { schedule: self.eps_schedule.clone(), budget: self.budget },
            puiseux: PuiseuxConfig { max_exponent: self.trunc, ..Default::default() },
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Indeterminate,
    Violation,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandRecord {
    pub line: usize,
    pub command: String,
    pub outcome: Outcome,
    pub summary: String,
    pub result: Value,
    pub error: Option<String>,
    #[serde(skip)]
    pub wall_time: Option<Duration>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub settings: Settings,
    pub commands: Vec<CommandRecord>,
}

impl Report {
    pub fn new(settings: Settings) -> Self {
        Report { schema: SCHEMA_VERSION, settings, commands: Vec::new() }
    }

    pub fn worst(&self) -> Outcome {
        self.commands.iter().map(|c| c.outcome).max().unwrap_or(Outcome::Pass)
    }

    /// 0 when everything passed, 2 for a violation, 3 for an indeterminate
    /// answer, 1 for a failed command.
    pub fn exit_code(&self) -> i32 {
        let has = |o: Outcome| self.commands.iter().any(|c| c.outcome == o);
        if has(Outcome::Error) {
            1
        } else if has(Outcome::Violation) {
            2
        } else if has(Outcome::Indeterminate) {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        normalize_floats(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Report, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Plain-text rendering, with wall times.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.commands {
            let time = c.wall_time.map(|t| format!(" ({:.2}s)", t.as_secs_f64())).unwrap_or_default();
            let _ = writeln!(out, "line {}: {}{time}", c.line, c.command);
            let _ = writeln!(out, "  [{}] {}", outcome_word(c.outcome), c.summary);
            if let Some(e) = &c.error {
                let _ = writeln!(out, "  error: {e}");
            }
        }
        out
    }
}

fn outcome_word(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Indeterminate => "indeterminate",
        Outcome::Violation => "violation",
        Outcome::Error => "error",
    }
}

/// Rounds every non-integral float to 10 significant digits.
fn normalize_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let rounded: f64 = format!("{x:.9e}").parse().expect("formatted float parses");
            *v = serde_json::Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(normalize_floats),
        Value::Object(map) => map.values_mut().for_each(normalize_floats),
        _ => {}
    }
}

/// Parses and runs a script. Parse errors abort; a failing command is
/// recorded and, unless `settings.strict`, the run goes on.
pub fn run_script(text: &str, settings: &Settings) -> Result<Report, ReportError> {
    let script = parse_script(text)?;
    Ok(run_parsed(&script, settings))
}

pub fn run_parsed(script: &Script, settings: &Settings) -> Report {
    let mut report = Report::new(settings.clone());
    for cmd in &script.commands {
        let start = Instant::now();
        let mut record = match run::execute(script, cmd, settings) {
            Ok(done) => CommandRecord {
                line: cmd.line,
                command: cmd.text.clone(),
                outcome: done.outcome,
                summary: done.summary,
                result: done.result,
                error: None,
                wall_time: None,
            },
            Err(e) => CommandRecord {
                line: cmd.line,
                command: cmd.text.clone(),
                outcome: Outcome::Error,
                summary: "failed".into(),
                result: Value::Null,
                error: Some(e.to_string()),
                wall_time: None,
            },
        };
        record.wall_time = Some(start.elapsed());
        let stop = settings.strict && matches!(record.outcome, Outcome::Error | Outcome::Violation);
        report.commands.push(record);
        if stop {
            break;
        }
    }
    report
}

/// Writes [`Report::to_json`] to `path`.
pub fn emit_json(report: &Report, path: &Path) -> Result<(), ReportError> {
    std::fs::write(path, report.to_json())
        .map_err(|source| ReportError::Io { path: path.display().to_string(), source })
}

pub fn load_json(path: &Path) -> Result<Report, ReportError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ReportError::Io { path: path.display().to_string(), source })?;
    Report::from_json(&text)
}
