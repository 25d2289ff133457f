use matchless_core::format::write_elements;
use matchless_core::params::KeyValues;
use matchless_core::solver::{solve_exact, verify_witness, Certificate, Problem, SearchSpace};
use serde_json::json;

use crate::args::{Globals, SolveArgs};
use crate::outcome::{failed, failure_lines, usage, CliError, Outcome, Status};

pub fn parse_problem(kind: &str, params: &[String]) -> Result<Problem, CliError> {
    let kv = KeyValues::parse(params.iter().map(String::as_str)).map_err(usage)?;
    Problem::parse(kind, &kv).map_err(usage)
}

pub fn run(a: &SolveArgs, g: &Globals) -> Result<Outcome, CliError> {
    let p = parse_problem(&a.kind, &a.params)?;
    let space = match &a.space {
        Some(s) => s.parse::<SearchSpace>().map_err(usage)?,
        None => SearchSpace::default_for(&p),
    };
    space.check_valid_for(&p).map_err(usage)?;
    let r = solve_exact(&p, space, g.budget()).map_err(failed)?;
    let checks = verify_witness(&r.witness, &p);
    let status = if !checks.passed() {
        Status::Fail
    } else if r.certificate == Certificate::BestFound {
        Status::BudgetExhausted
    } else {
        Status::Pass
    };
    let mut text = match r.certificate {
        Certificate::ProvedOptimal => format!(
            "{p} = {} (proved optimal; space {space}; {} nodes)",
            r.optimum, r.nodes
        ),
        Certificate::BestFound => format!(
            "{p} >= {} (budget exhausted; upper bound {}; space {space}; {} nodes)",
            r.optimum, r.upper_bound, r.nodes
        ),
    };
    for line in failure_lines([&checks]) {
        text += &format!("\n{line}");
    }
    if a.witness {
        text += &format!("\n{}", write_elements(&r.witness).trim_end());
    }
    let value = json!({ "solve": r, "witness_checks": checks });
    Ok(Outcome::new(status, value, text))
}
