use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use matchless_core::Report;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Globals;

pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    BudgetExhausted,
    Finding,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::BudgetExhausted => 2,
            Status::Finding => 3,
        }
    }

    pub fn of_reports<'a>(reports: impl IntoIterator<Item = &'a Report>) -> Status {
        if reports.into_iter().all(Report::passed) {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// What a command produced: machine-readable value plus a human summary.
pub struct Outcome {
    pub status: Status,
    pub value: Value,
    pub text: String,
}

impl Outcome {
    pub fn new(status: Status, value: Value, text: impl Into<String>) -> Self {
        Outcome {
            status,
            value,
            text: text.into(),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed arguments or parameters: exit 64.
    Usage(String),
    /// Anything that went wrong while running: exit 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

pub fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn failed(e: impl fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

#[derive(Serialize)]
pub struct Envelope<'a> {
    pub command: String,
    pub seed: String,
    pub status: Status,
    pub result: &'a Value,
    pub wall_ms: u64,
}

impl<'a> Envelope<'a> {
    pub fn new(command: String, g: &Globals, outcome: &'a Outcome, wall_ms: u64) -> Self {
        Envelope {
            command,
            seed: g.seed.to_string(),
            status: outcome.status,
            result: &outcome.value,
            wall_ms,
        }
    }
}

/// Prints the text summary, or the JSON report when `--json` was given.
pub fn emit(
    envelope: &Envelope,
    outcome: &Outcome,
    json: Option<Option<&Path>>,
) -> Result<(), String> {
    let text = serde_json::to_string_pretty(envelope).map_err(|e| e.to_string())?;
    match json {
        None => print!("{}", with_newline(&outcome.text)),
        Some(None) => println!("{text}"),
        Some(Some(path)) => {
            fs::write(path, format!("{text}\n"))
                .map_err(|e| format!("writing {}: {e}", path.display()))?;
            print!("{}", with_newline(&outcome.text));
        }
    }
    std::io::stdout().flush().map_err(|e| e.to_string())
}

pub fn write_error(
    path: &Path,
    command: &str,
    g: &Globals,
    message: &str,
    wall_ms: u64,
) -> std::io::Result<()> {
    let v = json!({
        "command": command,
        "seed": g.seed.to_string(),
        "status": "error",
        "error": message,
        "wall_ms": wall_ms,
    });
    fs::write(
        path,
        format!(
            "{}\n",
            serde_json::to_string_pretty(&v).expect("plain json")
        ),
    )
}

fn with_newline(s: &str) -> String {
    if s.is_empty() || s.ends_with('\n') {
        s.to_string()
    } else {
        format!("{s}\n")
    }
}

/// Text lines for every failing check of the reports.
pub fn failure_lines<'a>(reports: impl IntoIterator<Item = &'a Report>) -> Vec<String> {
    let mut out = Vec::new();
    for r in reports {
        for c in r.failures() {
            let mut line = format!("  FAIL {} / {}", r.subject, c.label);
            if let (Some(l), Some(rhs)) = (&c.lhs, &c.rhs) {
                line += &format!(": lhs {l}, rhs {rhs}");
            } else if !c.detail.is_empty() {
                line += &format!(": {}", c.detail);
            }
            if let Some(rep) = &c.reproducer {
                line += &format!(" [{rep}]");
            }
            out.push(line);
        }
    }
    out
}

/// Check totals as `(checks, failed, skipped, tight)`.
pub fn tally<'a>(reports: impl IntoIterator<Item = &'a Report>) -> (usize, usize, usize, usize) {
    use matchless_core::Outcome as O;
    let mut t = (0, 0, 0, 0);
    for r in reports {
        for c in &r.checks {
            t.0 += 1;
            match c.outcome {
                O::Fail => t.1 += 1,
                O::Skipped => t.2 += 1,
                O::Pass => {}
            }
            if c.tight {
                t.3 += 1;
            }
        }
    }
    t
}
