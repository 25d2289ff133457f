use std::fs;
use std::path::Path;

use matchless_core::circle::{
    averaging_check, averaging_consistency, circle_bound_sweep, incidence_check, x_profile,
    CircularPermutation,
};
use matchless_core::format::{parse_family, write_elements, write_hex};
use matchless_core::formulas::{evaluate, FORMULA_KINDS};
use matchless_core::gallery::{build, size_of, verify_construction, ConstructionSpec};
use matchless_core::params::KeyValues;
use matchless_core::stats::{
    check_partition_identities, sweep_checks, tuple_stats, Partition, TupleMode,
};
use matchless_core::{Report, SetFamily};
use serde_json::json;

use crate::args::{
    CircleAction, CircleArgs, ConstructArgs, FamilyFormat, FormulaArgs, Globals, Mode, StatsArgs,
};
use crate::outcome::{failed, failure_lines, tally, usage, CliError, Outcome, Status};

pub fn formula(a: &FormulaArgs) -> Result<Outcome, CliError> {
    if a.kind == "list" {
        return Ok(Outcome::new(
            Status::Pass,
            json!({ "kinds": FORMULA_KINDS }),
            FORMULA_KINDS.join("\n"),
        ));
    }
    let kv = KeyValues::parse(a.params.iter().map(String::as_str)).map_err(usage)?;
    let v = evaluate(&a.kind, &kv).map_err(usage)?;
    let shown = if v.value.is_integer() {
        v.value.to_integer().to_string()
    } else {
        v.value.to_string()
    };
    let mut text = format!("{} = {shown}", a.kind);
    if !v.guaranteed {
        text += &format!(" ({})", v.note);
    }
    let value = json!({
        "kind": a.kind,
        "value": shown,
        "guaranteed": v.guaranteed,
        "note": v.note,
    });
    Ok(Outcome::new(Status::Pass, value, text))
}

fn read_family(path: &Path) -> Result<SetFamily, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| usage(format!("reading {}: {e}", path.display())))?;
    parse_family(&text).map_err(usage)
}

fn mode_of(mode: Mode, trials: u64, seed: u64) -> TupleMode {
    match mode {
        Mode::Exact => TupleMode::Exact,
        Mode::Sample => TupleMode::Sample { trials, seed },
    }
}

fn report_outcome(
    reports: Vec<Report>,
    mut value: serde_json::Value,
    head: Vec<String>,
) -> Outcome {
    let status = Status::of_reports(&reports);
    let (checks, fails, skipped, tight) = tally(&reports);
    let mut text = head;
    text.push(format!(
        "{}: {checks} checks, {fails} failed, {skipped} skipped, {tight} tight",
        if status == Status::Pass {
            "pass"
        } else {
            "FAIL"
        }
    ));
    text.extend(failure_lines(&reports));
    value["reports"] = json!(reports);
    Outcome::new(status, value, text.join("\n"))
}

pub fn stats(a: &StatsArgs, g: &Globals) -> Result<Outcome, CliError> {
    let f = read_family(&a.family)?;
    let pi: Partition = a.partition.parse().map_err(usage)?;
    let st = tuple_stats(&f, &pi, mode_of(a.mode, a.trials, g.seed)).map_err(usage)?;
    let mut head = vec![format!("partition {pi} on n={}, |F| = {}", f.n(), f.len())];
    for (i, x) in st.x.iter().enumerate() {
        head.push(format!("X_{i} = {x}"));
    }
    let mut reports = Vec::new();
    if !st.sampled {
        reports.push(check_partition_identities(&f, &pi).map_err(usage)?);
    }
    if let Some(s) = a.s {
        reports.push(sweep_checks(&f, s).map_err(usage)?);
    }
    Ok(report_outcome(reports, json!({ "stats": st }), head))
}

fn parse_sigma(text: &str, n: usize) -> Result<CircularPermutation, CliError> {
    let order: Result<Vec<usize>, _> = text.split(',').map(|t| t.trim().parse::<usize>()).collect();
    let order = order.map_err(|e| usage(format!("--sigma: {e}")))?;
    if order.len() != n || order.contains(&0) {
        return Err(usage(format!("--sigma needs {n} elements from 1 to {n}")));
    }
    CircularPermutation::new(order.into_iter().map(|v| v - 1).collect()).map_err(usage)
}

pub fn circle(a: &CircleArgs, g: &Globals) -> Result<Outcome, CliError> {
    if a.action == CircleAction::Incidence {
        let r = incidence_check(a.s, a.m).map_err(usage)?;
        return Ok(report_outcome(vec![r], json!({}), vec![]));
    }
    let f = match &a.family {
        Some(p) => read_family(p)?,
        None => build(&ConstructionSpec::P {
            s: a.s,
            m: a.m,
            l: 2,
        })
        .map_err(usage)?,
    };
    match a.action {
        CircleAction::Bound => {
            let seed = a.sigma_seed.unwrap_or(g.seed);
            let r = circle_bound_sweep(&f, a.s, a.m, a.trials, seed).map_err(usage)?;
            Ok(report_outcome(vec![r], json!({}), vec![]))
        }
        CircleAction::Profile => {
            let sigma = match &a.sigma {
                Some(t) => parse_sigma(t, f.n())?,
                None => CircularPermutation::identity(f.n()),
            };
            let trace = x_profile(&f, &sigma, a.s, a.m).map_err(usage)?;
            let mut text = vec![
                format!("x = {:?}", trace.x),
                format!("weighted sum = {}", trace.lhs()),
            ];
            for (j, c) in trace.chains.iter().enumerate() {
                text.push(format!(
                    "chain {j}: r = {:#b}, x = {:?}, case {:?}",
                    c.r, c.x, c.profile.claim
                ));
            }
            let value = json!({ "trace": trace, "weighted_sum": trace.lhs().to_string() });
            Ok(Outcome::new(Status::Pass, value, text.join("\n")))
        }
        CircleAction::Averaged => {
            let r = averaging_check(&f, a.s, a.m, mode_of(a.mode, a.trials as u64, g.seed))
                .map_err(usage)?;
            Ok(report_outcome(vec![r], json!({}), vec![]))
        }
        CircleAction::Consistency => {
            let r = averaging_consistency(&f, a.s, a.m).map_err(usage)?;
            Ok(report_outcome(vec![r], json!({}), vec![]))
        }
        CircleAction::Incidence => unreachable!("handled above"),
    }
}

pub fn construct(a: &ConstructArgs) -> Result<Outcome, CliError> {
    let spec: ConstructionSpec = a.spec.parse().map_err(usage)?;
    let size = size_of(&spec).map_err(usage)?;
    let mut head = vec![format!("|{spec}| = {size} on n={}", spec.n())];
    let mut value = json!({ "spec": spec.to_string(), "n": spec.n(), "size": size.to_string() });
    if a.out.is_some() || a.print {
        let f = build(&spec).map_err(usage)?;
        let body = match a.format {
            FamilyFormat::Elements => write_elements(&f),
            FamilyFormat::Hex => write_hex(&f),
        };
        if let Some(path) = &a.out {
            fs::write(path, &body)
                .map_err(|e| failed(format!("writing {}: {e}", path.display())))?;
            head.push(format!("wrote {}", path.display()));
        }
        if a.print {
            head.push(body.trim_end().to_string());
        }
    }
    if !a.verify {
        return Ok(Outcome::new(Status::Pass, value, head.join("\n")));
    }
    let r = verify_construction(&spec).map_err(usage)?;
    value["verified"] = json!(true);
    Ok(report_outcome(vec![r], value, head))
}
