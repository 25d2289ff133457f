use std::collections::BTreeMap;

use matchless_core::circle::{
    averaging_check, averaging_consistency, chain_decompose, check_circle_bound,
    circle_bound_sweep, f_profile, incidence_check, CircularPermutation, ClaimStatus,
};
use matchless_core::formulas::{
    aux_value, binom, hm_size, int_rat, kleitman_e, p_conjectured_value, quinn_e, Aux,
    KleitmanPoint,
};
use matchless_core::gallery::{
    b_size, build, preset_alpha, size_of, verify_construction, AlphaPreset, ConstructionSpec,
};
use matchless_core::invariants::matching_number;
use matchless_core::sampling::{all_upsets, random_monotone, seeded};
use matchless_core::solver::{solve_exact, Certificate, Problem, SearchSpace};
use matchless_core::stats::{
    check_binomial_inequalities, exact_work, sweep_checks, Partition, TupleMode, EXACT_WORK_CAP,
};
use matchless_core::{Check, Outcome as CheckOutcome, Report, SetFamily};
use num::{BigInt, BigUint};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::args::{Globals, Suite, VerifyArgs};
use crate::outcome::{failed, failure_lines, tally, CliError, Outcome, Status};

struct SuiteRun {
    name: &'static str,
    reports: Vec<Report>,
    budget_hit: bool,
}

pub fn run(a: &VerifyArgs, g: &Globals) -> Result<Outcome, CliError> {
    let suites = match a.suite {
        Suite::Kleitman => vec![kleitman(a, g)?],
        Suite::Constructions => vec![constructions(a)?],
        Suite::Circle => vec![circle(a, g)?],
        Suite::Partition => vec![partition(a, g)?],
        Suite::Formulas => vec![formulas()?],
        Suite::All => vec![
            kleitman(a, g)?,
            constructions(a)?,
            circle(a, g)?,
            partition(a, g)?,
            formulas()?,
        ],
    };
    let mut status = Status::Pass;
    let mut text = Vec::new();
    let mut values = Vec::new();
    for s in &suites {
        let (checks, bad, skipped, tight) = tally(&s.reports);
        let st = if bad > 0 {
            Status::Fail
        } else if s.budget_hit {
            Status::BudgetExhausted
        } else {
            Status::Pass
        };
        status = status.max(st);
        text.push(format!(
            "{:<13} {}: {checks} checks, {bad} failed, {skipped} skipped, {tight} tight",
            s.name,
            if bad > 0 { "FAIL" } else { "pass" }
        ));
        text.extend(failure_lines(&s.reports));
        values.push(json!({
            "suite": s.name,
            "status": st,
            "checks": checks.to_string(),
            "failed": bad.to_string(),
            "skipped": skipped.to_string(),
            "tight": tight.to_string(),
            "reports": s.reports,
        }));
    }
    Ok(Outcome::new(
        status,
        json!({ "suites": values }),
        text.join("\n"),
    ))
}

fn kleitman(a: &VerifyArgs, g: &Globals) -> Result<SuiteRun, CliError> {
    let n_max = a.n_max.unwrap_or(8);
    let mut points = Vec::new();
    for s in 2..=a.s_max as i64 {
        for m in 1..=a.m_max as i64 {
            points.push((
                s * m - 1,
                s,
                kleitman_e(s, m, KleitmanPoint::BelowMultiple).map_err(failed)?,
                "sm-1",
            ));
            points.push((
                s * m,
                s,
                kleitman_e(s, m, KleitmanPoint::AtMultiple).map_err(failed)?,
                "sm",
            ));
            if s == 3 {
                points.push((3 * m + 1, 3, quinn_e(m).map_err(failed)?, "3m+1"));
            }
        }
    }
    points.sort_by_key(|x| (x.0, x.1));
    points.dedup_by(|x, y| (x.0, x.1) == (y.0, y.1));
    let budget = g.budget();
    let rows: Vec<(Check, bool)> = points
        .par_iter()
        .map(|&(n, s, ref value, at)| {
            let label = format!("e({n},{s}) at n = {at}");
            if n < 1 || n as usize > n_max {
                return (
                    Check::skipped(label, format!("n = {n} outside 1..={n_max}")),
                    false,
                );
            }
            let p = Problem::E {
                n: n as usize,
                s: s as usize,
            };
            match solve_exact(&p, SearchSpace::default_for(&p), budget) {
                Err(e) => (Check::skipped(label, e.to_string()), false),
                Ok(r) if r.certificate == Certificate::BestFound => (
                    Check::skipped(
                        label,
                        format!(
                            "budget exhausted at {} (bound {})",
                            r.optimum, r.upper_bound
                        ),
                    ),
                    true,
                ),
                Ok(r) => (
                    Check::equal(
                        label,
                        int_rat(r.optimum),
                        int_rat(BigInt::from(value.clone())),
                    )
                    .with_reproducer(format!("solve E n={n} s={s}")),
                    false,
                ),
            }
        })
        .collect();
    let mut rep = Report::new(format!(
        "search vs closed forms, s <= {}, m <= {}, n <= {n_max}",
        a.s_max, a.m_max
    ));
    let budget_hit = rows.iter().any(|r| r.1);
    for (c, _) in rows {
        rep.push(c);
    }
    Ok(SuiteRun {
        name: "kleitman",
        reports: vec![rep],
        budget_hit,
    })
}

fn construction_specs(n_max: usize) -> Vec<ConstructionSpec> {
    let mut specs = Vec::new();
    for s in 2..=8 {
        for m in 1..=3 {
            for l in 1..=s {
                if s * m + s - l <= n_max {
                    specs.push(ConstructionSpec::P { s, m, l });
                }
            }
            for n in (s * m).saturating_sub(1)..=n_max {
                specs.push(ConstructionSpec::W { m, s, n });
            }
        }
    }
    for s in 1..=8 {
        for k in 1..=4 {
            for n in (s * k).max(s + k)..=n_max {
                specs.push(ConstructionSpec::H { k, n, s });
            }
            for i in 1..=k {
                for n in (s + 1) * k..=n_max {
                    specs.push(ConstructionSpec::A { i, k, n, s });
                }
            }
        }
    }
    for s in 2..=6 {
        for n in 1..=n_max.min(10) {
            for q in 0..=n as i64 {
                specs.push(ConstructionSpec::B { n, q, s });
            }
        }
    }
    specs
}

fn threshold_check(spec: &ConstructionSpec) -> Option<Check> {
    let preset = match *spec {
        ConstructionSpec::P { s, m, l } => AlphaPreset::P { s, m, l },
        ConstructionSpec::W { m, s, n } => AlphaPreset::W { m, s, n },
        ConstructionSpec::H { k, n, s } if k >= 2 && n >= s + k => AlphaPreset::H { k, n, t: s },
        _ => return None,
    };
    let label = "threshold representation";
    let alpha = match preset_alpha(preset) {
        Ok(a) => a,
        Err(e) => return Some(Check::skipped(label, e.to_string())),
    };
    let (Ok(t), Ok(f)) = (build(&ConstructionSpec::Threshold(alpha)), build(spec)) else {
        return Some(Check::skipped(label, "could not materialize"));
    };
    Some(match *spec {
        // alpha_h only describes level k
        ConstructionSpec::H { k, .. } => {
            Check::holds(label, t.level(k) == f, "F(alpha_h) on level k")
        }
        _ => Check::holds(label, t == f, "F(alpha) equals the construction"),
    })
}

fn constructions(a: &VerifyArgs) -> Result<SuiteRun, CliError> {
    let n_max = a.n_max.unwrap_or(14).min(20);
    let specs = construction_specs(n_max);
    let reports: Result<Vec<Report>, CliError> = specs
        .par_iter()
        .map(|spec| {
            let mut r = verify_construction(spec).map_err(failed)?;
            if let Some(c) = threshold_check(spec) {
                r.push(c);
            }
            Ok(r)
        })
        .collect();
    Ok(SuiteRun {
        name: "constructions",
        reports: reports?,
        budget_hit: false,
    })
}

fn claim_report(s: usize) -> Report {
    let mut r = Report::new(format!("window cases s={s}"));
    for n_bar in s + 1..=14 {
        let t = n_bar % s;
        if t == 0 || t > s - 2 {
            continue;
        }
        let mut bad = None;
        for set in 0u32..1 << n_bar {
            if let ClaimStatus::Violated { .. } = f_profile(set, n_bar, s).claim {
                bad = Some(set);
                break;
            }
        }
        let detail = match bad {
            None => format!("all {} subsets of Z_{n_bar} satisfy a case", 1u64 << n_bar),
            Some(set) => format!("R = {set:#b} satisfies no case"),
        };
        r.push(Check::holds(
            format!("window cases n_bar={n_bar}"),
            bad.is_none(),
            detail,
        ));
    }
    r
}

fn circle(a: &VerifyArgs, g: &Globals) -> Result<SuiteRun, CliError> {
    let (s, m) = (a.s, a.m);
    let n = s * m + s - 2;
    if s < 3 || m < 1 || n > 24 {
        return Err(CliError::Usage(format!(
            "circle suite needs s >= 3, m >= 1 and sm+s-2 <= 24; got s={s}, m={m}"
        )));
    }
    let p = build(&ConstructionSpec::P { s, m, l: 2 }).map_err(failed)?;
    let mut reports = Vec::new();
    let d = chain_decompose(n, s, m).map_err(failed)?;
    let mut arcs: Vec<usize> = d.chains.iter().flatten().copied().collect();
    arcs.sort_unstable();
    let mut chains = Report::new(format!("chains s={s} m={m} n={n}"));
    chains.push(Check::holds(
        "chains partition the arcs",
        arcs == (0..n).collect::<Vec<_>>(),
        format!("d={} n_bar={}", d.d, d.n_bar),
    ));
    reports.push(chains);
    reports.push(check_circle_bound(&p, &CircularPermutation::identity(n), s, m).map_err(failed)?);
    reports.push(circle_bound_sweep(&p, s, m, a.trials, g.seed).map_err(failed)?);
    let mut rng = seeded(g.seed);
    for k in 0..10u64 {
        let f = random_monotone(&mut rng, n, s);
        reports.push(
            circle_bound_sweep(&f, s, m, a.trials / 10, g.seed.wrapping_add(k + 1))
                .map_err(failed)?,
        );
    }
    let pi = Partition::equal(s, m).map_err(failed)?;
    if exact_work(n, &pi) <= EXACT_WORK_CAP {
        reports.push(averaging_check(&p, s, m, TupleMode::Exact).map_err(failed)?);
    }
    if n <= 8 {
        reports.push(incidence_check(s, m).map_err(failed)?);
        reports.push(averaging_consistency(&p, s, m).map_err(failed)?);
    }
    if s <= 6 {
        reports.push(claim_report(s));
    }
    Ok(SuiteRun {
        name: "circle",
        reports,
        budget_hit: false,
    })
}

#[derive(Default)]
struct Tally {
    pass: usize,
    skipped: usize,
    failed: usize,
    first: Option<String>,
}

/// Folds the per-family reports of one group into one check per label.
fn fold_group(subject: String, runs: Vec<(String, Report)>) -> Report {
    let mut labels: BTreeMap<String, Tally> = BTreeMap::new();
    for (family, rep) in &runs {
        for c in &rep.checks {
            let t = labels.entry(c.label.clone()).or_default();
            match c.outcome {
                CheckOutcome::Pass => t.pass += 1,
                CheckOutcome::Skipped => t.skipped += 1,
                CheckOutcome::Fail => {
                    t.failed += 1;
                    if t.first.is_none() {
                        let sides = match (&c.lhs, &c.rhs) {
                            (Some(l), Some(r)) => format!("lhs {l}, rhs {r}"),
                            _ => c.detail.clone(),
                        };
                        t.first = Some(format!("{sides} on {family}"));
                    }
                }
            }
        }
    }
    let mut r = Report::new(format!("{subject} ({} families)", runs.len()));
    for (label, t) in labels {
        if t.pass + t.failed == 0 {
            r.push(Check::skipped(
                label,
                format!("skipped on all {} families", t.skipped),
            ));
            continue;
        }
        let detail = format!(
            "{} passed, {} failed, {} skipped",
            t.pass, t.failed, t.skipped
        );
        let mut c = Check::holds(label, t.failed == 0, detail);
        if let Some(first) = t.first {
            c = c.with_reproducer(first);
        }
        r.push(c);
    }
    r
}

fn family_text(f: &SetFamily) -> String {
    let members: Vec<String> = f.members().map(|a| a.to_string()).collect();
    format!("n={} [{}]", f.n(), members.join(" "))
}

fn partition(a: &VerifyArgs, g: &Globals) -> Result<SuiteRun, CliError> {
    let n_max = a.n_max.unwrap_or(5).min(5);
    let mut groups: BTreeMap<(usize, usize, &'static str), Vec<SetFamily>> = BTreeMap::new();
    for n in 2..=n_max {
        for f in all_upsets(n) {
            let nu = matching_number(&f).nu;
            for s in (nu + 1).max(2)..=n {
                groups
                    .entry((n, s, "exhaustive up-sets"))
                    .or_default()
                    .push(f.clone());
            }
        }
    }
    let mut rng = seeded(g.seed);
    for _ in 0..a.samples {
        let s = rng.gen_range(2..=5);
        let n = rng.gen_range(s..=10.min(3 * s));
        groups
            .entry((n, s, "random up-sets"))
            .or_default()
            .push(random_monotone(&mut rng, n, s));
    }
    let reports: Result<Vec<Report>, CliError> = groups
        .into_par_iter()
        .map(|((n, s, kind), fams)| {
            let runs: Result<Vec<(String, Report)>, CliError> = fams
                .iter()
                .map(|f| Ok((family_text(f), sweep_checks(f, s).map_err(failed)?)))
                .collect();
            Ok(fold_group(format!("{kind} n={n} s={s}"), runs?))
        })
        .collect();
    Ok(SuiteRun {
        name: "partition",
        reports: reports?,
        budget_hit: false,
    })
}

fn formulas() -> Result<SuiteRun, CliError> {
    let mut reports = Vec::new();
    for s in 2..=12 {
        for m in 0..=8 {
            for l in 1..=s {
                reports.push(check_binomial_inequalities(s, m, l).map_err(failed)?);
            }
        }
    }
    let mut r = Report::new("counting formulas");
    let mut bad = None;
    for s in 2..=6i64 {
        for n in 1..=30i64 {
            for q in 0..=n {
                if b_size(n, q, s) != b_size(n - 1, q, s) + b_size(n - 1, q - s, s) && bad.is_none()
                {
                    bad = Some(format!("n={n} q={q} s={s}"));
                }
            }
        }
    }
    r.push(Check::holds(
        "|B(n,q,s)| = |B(n-1,q,s)| + |B(n-1,q-s,s)|",
        bad.is_none(),
        bad.unwrap_or_else(|| "n <= 30, q <= n, s <= 6".into()),
    ));
    let mut bad = None;
    for k in 2..=4i64 {
        for s in 1..=3i64 {
            for n in (s * k).max(s + k)..=16 {
                let spec = ConstructionSpec::H {
                    k: k as usize,
                    n: n as usize,
                    s: s as usize,
                };
                let built = BigInt::from(build(&spec).map_err(failed)?.len());
                if hm_size(k, n, s).map_err(failed)?.value != built && bad.is_none() {
                    bad = Some(format!("k={k} n={n} s={s}"));
                }
            }
        }
    }
    r.push(Check::holds(
        "|H^(k)(n,s)| closed form = materialized",
        bad.is_none(),
        bad.unwrap_or_else(|| "2 <= k <= 4, s <= 3, n <= 16".into()),
    ));
    let mut bad = None;
    for s in 2..=8i64 {
        for m in 1..=5i64 {
            let p = p_conjectured_value(s, m, 1).map_err(failed)?.value;
            if p != kleitman_e(s, m + 1, KleitmanPoint::BelowMultiple).map_err(failed)?
                && bad.is_none()
            {
                bad = Some(format!("s={s} m={m}"));
            }
            let w = aux_value(Aux::WSize { m, s }).map_err(failed)?.value;
            let built = size_of(&ConstructionSpec::W {
                m: m as usize,
                s: s as usize,
                n: (s * m + 1) as usize,
            })
            .map_err(failed)?;
            if w != BigInt::from(built) && bad.is_none() {
                bad = Some(format!("W size s={s} m={m}"));
            }
        }
    }
    r.push(Check::holds(
        "|P(s,m,1)| = e(s(m+1)-1,s) and W size formula",
        bad.is_none(),
        bad.unwrap_or_else(|| "s <= 8, m <= 5".into()),
    ));
    let mut bad = None;
    for m in 1..=8i64 {
        let pts = [
            kleitman_e(3, m, KleitmanPoint::BelowMultiple).map_err(failed)?,
            kleitman_e(3, m, KleitmanPoint::AtMultiple).map_err(failed)?,
            quinn_e(m).map_err(failed)?,
            kleitman_e(3, m + 1, KleitmanPoint::BelowMultiple).map_err(failed)?,
        ];
        if pts.windows(2).any(|w| w[1] < BigUint::from(2u32) * &w[0]) && bad.is_none() {
            bad = Some(format!("m={m}"));
        }
    }
    r.push(Check::holds(
        "e(n+1,3) >= 2e(n,3) on consecutive known points",
        bad.is_none(),
        bad.unwrap_or_else(|| "m <= 8".into()),
    ));
    r.push(Check::equal(
        "C(40,20)",
        int_rat(BigInt::from(binom(40, 20))),
        int_rat(137846528820i64),
    ));
    reports.push(r);
    Ok(SuiteRun {
        name: "formulas",
        reports,
        budget_hit: false,
    })
}
