use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command, Globals, RunArgs};
use crate::dispatch;
use crate::outcome::{failed, usage, CliError, Outcome, Status};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Campaign {
    name: String,
    seed: Option<u64>,
    budget_nodes: Option<u64>,
    budget_seconds: Option<u64>,
    /// Where to write the combined JSON report.
    output: Option<PathBuf>,
    tasks: Vec<Task>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Task {
    name: Option<String>,
    /// Command-line arguments after the program name.
    args: Vec<String>,
}

/// Campaign-level settings apply to every task that does not set them itself.
fn task_argv(c: &Campaign, g: &Globals, task: &Task) -> Vec<String> {
    let mut argv = vec!["matchless".to_string()];
    let has = |flag: &str| {
        task.args
            .iter()
            .any(|a| a == flag || a.starts_with(&format!("{flag}=")))
    };
    let seed = c.seed.unwrap_or(g.seed);
    if !has("--seed") {
        argv.extend(["--seed".into(), seed.to_string()]);
    }
    if let (false, Some(n)) = (has("--budget-nodes"), c.budget_nodes.or(g.budget_nodes)) {
        argv.extend(["--budget-nodes".into(), n.to_string()]);
    }
    if let (false, Some(s)) = (
        has("--budget-seconds"),
        c.budget_seconds.or(g.budget_seconds),
    ) {
        argv.extend(["--budget-seconds".into(), s.to_string()]);
    }
    argv.extend(task.args.iter().cloned());
    argv
}

fn run_task(c: &Campaign, g: &Globals, index: usize, task: &Task) -> (Option<Status>, Value) {
    let argv = task_argv(c, g, task);
    let start = Instant::now();
    let result = match Cli::try_parse_from(&argv) {
        Err(e) => Err(usage(e.to_string().trim_end())),
        Ok(cli) if matches!(cli.command, Command::Run(_)) => {
            Err(usage("campaigns cannot nest `run`"))
        }
        Ok(cli) => dispatch(&cli.command, &cli.globals),
    };
    let wall_ms = start.elapsed().as_millis() as u64;
    let mut v = json!({
        "index": index,
        "name": task.name,
        "args": task.args,
        "wall_ms": wall_ms,
    });
    match result {
        Ok(o) => {
            v["status"] = json!(o.status);
            v["result"] = o.value;
            (Some(o.status), v)
        }
        Err(e) => {
            v["status"] = json!("error");
            v["error"] = json!(e.to_string());
            (None, v)
        }
    }
}

pub fn run(a: &RunArgs, g: &Globals) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(&a.campaign)
        .map_err(|e| usage(format!("reading {}: {e}", a.campaign.display())))?;
    let c: Campaign = serde_json::from_str(&text)
        .map_err(|e| usage(format!("campaign {}: {e}", a.campaign.display())))?;
    let results: Vec<(Option<Status>, Value)> = c
        .tasks
        .par_iter()
        .enumerate()
        .map(|(i, t)| run_task(&c, g, i, t))
        .collect();
    // an errored task counts as a failure
    let status = results
        .iter()
        .map(|(s, _)| s.unwrap_or(Status::Fail))
        .max()
        .unwrap_or(Status::Pass);
    let mut lines = vec![format!("campaign {}: {} tasks", c.name, c.tasks.len())];
    for ((s, v), t) in results.iter().zip(&c.tasks) {
        let label = t.name.clone().unwrap_or_else(|| t.args.join(" "));
        let tag = match s {
            Some(s) => serde_json::to_string(s)
                .expect("plain enum")
                .trim_matches('"')
                .to_string(),
            None => format!("error: {}", v["error"].as_str().unwrap_or("")),
        };
        lines.push(format!("  [{}] {label}: {tag}", v["index"]));
    }
    let value = json!({
        "campaign": c.name,
        "tasks": results.into_iter().map(|(_, v)| v).collect::<Vec<_>>(),
    });
    if let Some(path) = &c.output {
        let body = serde_json::to_string_pretty(&value).map_err(failed)?;
        fs::write(path, format!("{body}\n"))
            .map_err(|e| failed(format!("writing {}: {e}", path.display())))?;
        lines.push(format!("wrote {}", path.display()));
    }
    Ok(Outcome::new(status, value, lines.join("\n")))
}
