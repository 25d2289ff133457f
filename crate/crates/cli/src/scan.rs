use matchless_core::formulas::p_conjectured_value;
use matchless_core::solver::{solve_exact, threshold_search, Certificate, Problem, SearchSpace};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::{Globals, ScanArgs, ScanTarget};
use crate::outcome::{failed, usage, CliError, Outcome, Status};

#[derive(Serialize)]
struct Row {
    s: usize,
    m: usize,
    l: usize,
    n: usize,
    solver: String,
    proved: bool,
    p: String,
    /// `0 < l <= ceil(s/2)`, where `e = |P|` is conjectured.
    in_range: bool,
    verdict: &'static str,
}

pub fn run(a: &ScanArgs, g: &Globals) -> Result<Outcome, CliError> {
    match a.target {
        ScanTarget::PFamily => p_family(a, g),
        ScanTarget::Threshold => threshold(a, g),
    }
}

fn p_family(a: &ScanArgs, g: &Globals) -> Result<Outcome, CliError> {
    if a.n_max > 24 {
        return Err(usage("--n-max is capped at 24"));
    }
    let mut grid = Vec::new();
    for s in 2..=a.n_max {
        for m in 1..=a.n_max {
            for l in 1..=s {
                let n = s * m + s - l;
                if n <= a.n_max {
                    grid.push((s, m, l, n));
                }
            }
        }
    }
    grid.sort_by_key(|&(s, m, l, n)| (n, s, m, l));
    let budget = g.budget();
    let rows: Result<Vec<Row>, CliError> = grid
        .par_iter()
        .map(|&(s, m, l, n)| {
            let conj = p_conjectured_value(s as i64, m as i64, l as i64).map_err(failed)?;
            let in_range = 2 * l <= s + 1;
            let p = Problem::E { n, s };
            let r = solve_exact(&p, SearchSpace::default_for(&p), budget).map_err(failed)?;
            let proved = r.certificate == Certificate::ProvedOptimal;
            let opt = num::BigUint::from(r.optimum);
            let verdict = match (proved, opt.cmp(&conj.value)) {
                (_, std::cmp::Ordering::Greater) if in_range => "counterexample",
                (_, std::cmp::Ordering::Greater) => "exceeds",
                (true, std::cmp::Ordering::Equal) => "match",
                (true, std::cmp::Ordering::Less) => "solver below |P|",
                (false, _) => "open",
            };
            Ok(Row {
                s,
                m,
                l,
                n,
                solver: r.optimum.to_string(),
                proved,
                p: conj.value.to_string(),
                in_range,
                verdict,
            })
        })
        .collect();
    let rows = rows?;
    let status = if rows
        .iter()
        .any(|r| r.verdict == "counterexample" || r.verdict == "solver below |P|")
    {
        Status::Finding
    } else if rows.iter().any(|r| r.verdict == "open") {
        Status::BudgetExhausted
    } else {
        Status::Pass
    };
    let mut text = vec![format!(
        "{:>3} {:>3} {:>3} {:>3} {:>10} {:>10}  verdict",
        "s", "m", "l", "n", "solver", "|P|"
    )];
    for r in &rows {
        let solver = if r.proved {
            r.solver.clone()
        } else {
            format!(">={}", r.solver)
        };
        let range = if r.in_range {
            ""
        } else {
            " (outside conjectured range)"
        };
        text.push(format!(
            "{:>3} {:>3} {:>3} {:>3} {:>10} {:>10}  {}{range}",
            r.s, r.m, r.l, r.n, solver, r.p, r.verdict
        ));
    }
    Ok(Outcome::new(
        status,
        json!({ "n_max": a.n_max.to_string(), "rows": rows }),
        text.join("\n"),
    ))
}

fn threshold(a: &ScanArgs, g: &Globals) -> Result<Outcome, CliError> {
    let (Some(n), Some(s)) = (a.n, a.s) else {
        return Err(usage("scan threshold needs --n and --s"));
    };
    let t = threshold_search(n, s, a.iters, g.seed).map_err(usage)?;
    let mut text = vec![format!(
        "best threshold family on n={n}, s={s}: {} (alpha = {})",
        t.size, t.best
    )];
    let mut exact = None;
    let p = Problem::E { n, s };
    if n <= 8 {
        let r = solve_exact(&p, SearchSpace::default_for(&p), g.budget()).map_err(failed)?;
        exact = Some(r);
    }
    let status = match &exact {
        Some(r) if t.size > r.optimum => {
            text.push(format!(
                "threshold value exceeds the search optimum {}",
                r.optimum
            ));
            Status::Fail
        }
        Some(r) if r.certificate == Certificate::ProvedOptimal && t.size < r.optimum => {
            text.push(format!(
                "exact optimum {} is not reached by any threshold family found",
                r.optimum
            ));
            Status::Finding
        }
        Some(r) if r.certificate == Certificate::ProvedOptimal => {
            text.push(format!(
                "exact optimum {} is attained by a threshold family",
                r.optimum
            ));
            Status::Pass
        }
        Some(r) => {
            text.push(format!(
                "exact search inconclusive (best {}, bound {})",
                r.optimum, r.upper_bound
            ));
            Status::BudgetExhausted
        }
        None => {
            text.push("no exact comparison for n > 8".into());
            Status::Pass
        }
    };
    let value = json!({
        "search": t,
        "exact": exact.as_ref().map(|r| json!({
            "optimum": r.optimum.to_string(),
            "certificate": r.certificate,
        })),
    });
    Ok(Outcome::new(status, value, text.join("\n")))
}
