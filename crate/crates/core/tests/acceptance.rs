//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the lines always reach the terminal; exits nonzero when any
//! criterion fails other than the known three-level counterexamples.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use matchless_core::circle::{
    averaging_check, check_circle_bound, circle_bound_sweep, f_profile, incidence_check,
    CircularPermutation, ClaimStatus,
};
use matchless_core::formulas::{
    aux_value, emc_value, int_rat, kleitman_e, quinn_e, rat, Aux, KleitmanPoint,
};
use matchless_core::gallery::{
    b_size, build, p_size, preset_alpha, size_of, verify_construction, AlphaPreset,
    ConstructionSpec,
};
use matchless_core::invariants::matching_number;
use matchless_core::sampling::{all_upsets, random_monotone, seeded};
use matchless_core::solver::{
    brute_force_oracle, solve_exact, Budget, Certificate, OracleSpace, Problem, SearchSpace,
    SolveResult,
};
use matchless_core::stats::{sweep_checks, EqualTupleView, TupleMode};
use matchless_core::{Check, SetFamily};
use num::{BigInt, BigRational, BigUint};
use rand::Rng;

enum Verdict {
    Pass(String),
    Fail(String),
    /// Fails, but only on counterexamples that are pinned and explained.
    KnownFail(String),
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn solve_within(p: Problem, limit: Duration) -> Result<(SolveResult, Duration), String> {
    let start = Instant::now();
    let budget = Budget {
        time: limit,
        ..Budget::default()
    };
    let r =
        solve_exact(&p, SearchSpace::default_for(&p), budget).map_err(|e| format!("{p}: {e}"))?;
    let took = start.elapsed();
    ensure(
        r.certificate == Certificate::ProvedOptimal,
        format!("{p}: budget exhausted"),
    )?;
    ensure(took <= limit, format!("{p}: took {took:?}"))?;
    Ok((r, took))
}

fn expect_value(p: Problem, limit: Duration, expected: &BigUint) -> Outcome {
    let (r, took) = solve_within(p, limit)?;
    ensure(
        &BigUint::from(r.optimum) == expected,
        format!("{p} = {} but formula gives {expected}", r.optimum),
    )?;
    Ok(format!("{p}={} ({took:.1?})", r.optimum))
}

fn c1_kleitman() -> Outcome {
    let limit = Duration::from_secs(300);
    let a = expect_value(
        Problem::E { n: 5, s: 3 },
        limit,
        &kleitman_e(3, 2, KleitmanPoint::BelowMultiple).unwrap(),
    )?;
    let b = expect_value(
        Problem::E { n: 6, s: 3 },
        limit,
        &kleitman_e(3, 2, KleitmanPoint::AtMultiple).unwrap(),
    )?;
    Ok(format!("{a}, {b}"))
}

fn c2_quinn() -> Outcome {
    let expected = quinn_e(2).unwrap();
    ensure(expected == BigUint::from(105u32), "quinn_e(2) != 105")?;
    expect_value(
        Problem::E { n: 7, s: 3 },
        Duration::from_secs(900),
        &expected,
    )
}

fn c3_smallest() -> Outcome {
    let p = p_size(3, 1, 2);
    let v = expect_value(Problem::E { n: 4, s: 3 }, Duration::from_secs(60), &p)?;
    let deficiency = aux_value(Aux::SmallDeficiency { s: 3, l: 2 }).unwrap();
    let missing = BigInt::from(16) - BigInt::from(p.clone());
    ensure(
        missing == deficiency.value && deficiency.value == BigInt::from(4),
        format!("missing {missing}, deficiency {}", deficiency.value),
    )?;
    Ok(format!("{v} = |P(3,1,2)|, 16-12 = 4 = 2(s-l)+2"))
}

fn c4_wlog() -> Outcome {
    let mut compared = 0;
    for n in 1..=4 {
        for s in 2..=4 {
            let p = Problem::E { n, s };
            if p.validate().is_err() {
                continue;
            }
            let shifted = solve_exact(&p, SearchSpace::MonotoneShifted, Budget::default())
                .map_err(|e| e.to_string())?;
            let oracle = brute_force_oracle(&p, OracleSpace::All).map_err(|e| e.to_string())?;
            ensure(
                shifted.optimum == oracle,
                format!("{p}: shifted {} vs all {oracle}", shifted.optimum),
            )?;
            compared += 1;
        }
    }
    Ok(format!("{compared} problems agree with full enumeration"))
}

fn c5_uniform() -> Outcome {
    let mut out = Vec::new();
    for (n, k, s, want) in [(5, 2, 2, 4u32), (8, 2, 3, 13), (9, 3, 2, 28)] {
        let formula = emc_value(n as i64, k as i64, s as i64).unwrap();
        ensure(
            formula.guaranteed && formula.value == BigInt::from(want),
            format!("evaluator at ({n},{k},{s})"),
        )?;
        out.push(expect_value(
            Problem::EK { n, k, s },
            Duration::from_secs(60),
            &BigUint::from(want),
        )?);
    }
    Ok(out.join(", "))
}

fn c6_f_values() -> Outcome {
    let limit = Duration::from_secs(60);
    let below = aux_value(Aux::FBelowMultiple { n: 5, s: 2, m: 2 })
        .unwrap()
        .value;
    let two_short = aux_value(Aux::FTwoShort { n: 5, s: 3, m: 1 })
        .unwrap()
        .value;
    let a = expect_value(
        Problem::F { n: 5, q: 3, s: 2 },
        limit,
        &below.to_biguint().unwrap(),
    )?;
    let b = expect_value(
        Problem::F { n: 5, q: 4, s: 3 },
        limit,
        &two_short.to_biguint().unwrap(),
    )?;
    let mut checked = 0;
    for s in 2..=6i64 {
        for n in 1..=30i64 {
            for q in 0..=n {
                let lhs = b_size(n, q, s);
                let rhs = b_size(n - 1, q, s) + b_size(n - 1, q - s, s);
                ensure(
                    lhs == rhs,
                    format!("B recursion fails at n={n} q={q} s={s}: {lhs} vs {rhs}"),
                )?;
                checked += 1;
            }
        }
    }
    // the counting formula itself, against materialized families
    for s in 2..=6usize {
        for n in 1..=12usize {
            for q in 0..=n as i64 {
                let built = build(&ConstructionSpec::B { n, q, s }).map_err(|e| e.to_string())?;
                ensure(
                    BigUint::from(built.len()) == b_size(n as i64, q, s as i64),
                    format!("|B({n},{q},{s})|"),
                )?;
            }
        }
    }
    Ok(format!("{a}, {b}; recursion exact on {checked} triples"))
}

fn equality(c: &Check, want: BigRational) -> Result<(), String> {
    ensure(
        c.passed() && c.tight && c.lhs.as_ref() == Some(&want),
        format!("{}: lhs {:?} rhs {:?}", c.label, c.lhs, c.rhs),
    )
}

fn c7_equalities() -> Outcome {
    let p = |s, m, l| build(&ConstructionSpec::P { s, m, l }).unwrap();
    let avg = averaging_check(&p(5, 1, 2), 5, 1, TupleMode::Exact).map_err(|e| e.to_string())?;
    equality(avg.get("averaged bound").unwrap(), rat(3, 8))?;
    equality(
        &EqualTupleView::new(&p(3, 1, 2), 3).unwrap().three_level(),
        int_rat(3),
    )?;
    equality(
        &EqualTupleView::new(&p(4, 1, 2), 4)
            .unwrap()
            .three_level_two_short(),
        int_rat(5),
    )?;
    let circle = check_circle_bound(&p(5, 1, 2), &CircularPermutation::identity(8), 5, 1)
        .map_err(|e| e.to_string())?;
    equality(circle.get("circle bound").unwrap(), int_rat(3))?;
    Ok("averaged 3/8, three-level 3, three-level (l=2) 5, circle 3: all exact equalities".into())
}

fn c8_sweeps() -> Verdict {
    let mut failures: BTreeSet<(String, usize, usize, String)> = BTreeSet::new();
    let mut families = 0;
    let mut record = |f: &SetFamily, s: usize| {
        for c in sweep_checks(f, s).unwrap().failures() {
            failures.insert((c.label.clone(), f.n(), s, format!("{f:?}")));
        }
    };
    let mut rng = seeded(2024);
    for _ in 0..1000 {
        let s = rng.gen_range(2..=5);
        let n = rng.gen_range(s..=10.min(3 * s));
        record(&random_monotone(&mut rng, n, s), s);
        families += 1;
    }
    for n in 2..=5 {
        for f in all_upsets(n) {
            let nu = matching_number(&f).nu;
            for s in (nu + 1).max(2)..=n {
                record(&f, s);
                families += 1;
            }
        }
    }
    let unexpected: Vec<_> = failures
        .iter()
        .filter(|(label, n, s, _)| !(label == "three-level bound" && *n == 4 && *s == 3))
        .collect();
    if !unexpected.is_empty() {
        return Verdict::Fail(format!(
            "{} unexpected violations, first: {:?}",
            unexpected.len(),
            unexpected[0]
        ));
    }
    if failures.is_empty() {
        return Verdict::Pass(format!("{families} (family, s) pairs, zero violations"));
    }
    // exactly the six up-sets on [4] found by exhaustive search, nothing else
    if failures.len() != 6 {
        return Verdict::Fail(format!(
            "{} three-level violations at n=4, s=3, expected 6",
            failures.len()
        ));
    }
    Verdict::KnownFail(format!(
        "{families} (family, s) pairs; the three-level bound fails on {} up-sets at n=4, s=3 (e.g. all sets meeting {{1,2}}: 5/2 < 8/3); every other check has zero violations",
        failures.len()
    ))
}

fn c9_circle() -> Outcome {
    let mut profiles = 0u64;
    for s in 3..=6 {
        for n_bar in s + 1..=14 {
            let t = n_bar % s;
            if t == 0 || t > s - 2 {
                continue;
            }
            for r in 0u32..1 << n_bar {
                match f_profile(r, n_bar, s).claim {
                    ClaimStatus::Holds { .. } => profiles += 1,
                    ClaimStatus::Violated { t } => {
                        return Err(format!("R={r:#b} n_bar={n_bar} s={s} t={t}"))
                    }
                    ClaimStatus::Skipped { reason } => {
                        return Err(format!("unexpected skip: {reason}"))
                    }
                }
            }
        }
    }
    for (s, m) in [(5, 1), (4, 2)] {
        let f = build(&ConstructionSpec::P { s, m, l: 2 }).unwrap();
        let r = circle_bound_sweep(&f, s, m, 1000, 1).map_err(|e| e.to_string())?;
        ensure(
            r.passed(),
            format!(
                "circle bound sweep at s={s} m={m}: {:?}",
                r.failures().collect::<Vec<_>>()
            ),
        )?;
    }
    for (s, m, want) in [(4, 1, 12u64), (5, 1, 48)] {
        let n = s * m + s - 2;
        let fact = |k: usize| (1..=k as u64).product::<u64>();
        ensure(
            n as u64 * fact(m).pow(s as u32) * fact(s - 2) == want,
            "incidence constant",
        )?;
        let r = incidence_check(s, m).map_err(|e| e.to_string())?;
        ensure(
            r.passed(),
            format!(
                "incidence at s={s} m={m}: {:?}",
                r.failures().collect::<Vec<_>>()
            ),
        )?;
    }
    Ok(format!("claim holds on {profiles} window profiles; 1000 permutations at (5,1), (4,2); incidence 12 and 48"))
}

fn c10_w_vs_p() -> Outcome {
    let start = Instant::now();
    let w = size_of(&ConstructionSpec::W {
        m: 20,
        s: 20,
        n: 401,
    })
    .map_err(|e| e.to_string())?;
    let p = size_of(&ConstructionSpec::P {
        s: 20,
        m: 20,
        l: 19,
    })
    .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(w > p, "|W| <= |P|")?;
    ensure(took < Duration::from_secs(10), format!("took {took:?}"))?;
    let diff = &w - &p;
    Ok(format!(
        "|W| - |P| = {diff} ({} digits) in {took:.1?}",
        diff.to_string().len()
    ))
}

fn verified(spec: &ConstructionSpec) -> Result<SetFamily, String> {
    let rep = verify_construction(spec).map_err(|e| format!("{spec}: {e}"))?;
    let bad: Vec<_> = rep
        .failures()
        .map(|c| format!("{} ({})", c.label, c.detail))
        .collect();
    ensure(bad.is_empty(), format!("{spec}: {}", bad.join("; ")))?;
    ensure(
        !spec.expect_shifted() || rep.get("shifted").is_some(),
        format!("{spec}: shiftedness not checked"),
    )?;
    build(spec).map_err(|e| e.to_string())
}

fn c11_grid() -> Outcome {
    let mut count = 0;
    for s in 2..=8 {
        for m in 1..=3 {
            for l in 1..=s {
                let n = s * m + s - l;
                if n > 20 {
                    continue;
                }
                let f = verified(&ConstructionSpec::P { s, m, l })?;
                let alpha = preset_alpha(AlphaPreset::P { s, m, l }).map_err(|e| e.to_string())?;
                ensure(
                    build(&ConstructionSpec::Threshold(alpha)).unwrap() == f,
                    format!("F(alpha_p) != P({s},{m},{l})"),
                )?;
                count += 1;
            }
            for n in (s * m).saturating_sub(1)..=20 {
                let f = verified(&ConstructionSpec::W { m, s, n })?;
                let alpha = preset_alpha(AlphaPreset::W { m, s, n }).map_err(|e| e.to_string())?;
                ensure(
                    build(&ConstructionSpec::Threshold(alpha)).unwrap() == f,
                    format!("F(alpha_w) != W({m},{s}) on n={n}"),
                )?;
                count += 1;
            }
        }
        for k in 1..=4 {
            for n in (s * k).max(s + k)..=20 {
                verified(&ConstructionSpec::H { k, n, s })?;
                count += 1;
            }
        }
    }
    Ok(format!(
        "{count} constructions: sizes, nu, tau, threshold representations, shiftedness"
    ))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("e(5,3) and e(6,3) by search", || c1_kleitman().into()),
        ("e(7,3) by search", || c2_quinn().into()),
        ("e(4,3) and its deficiency", || c3_smallest().into()),
        ("shifted search equals full enumeration", || {
            c4_wlog().into()
        }),
        ("uniform values", || c5_uniform().into()),
        ("f-values and the B recursion", || c6_f_values().into()),
        ("extremal equality fixtures", || c7_equalities().into()),
        ("property sweeps", c8_sweeps),
        ("circle suite", || c9_circle().into()),
        ("W beats P at n = 401", || c10_w_vs_p().into()),
        ("construction grid", || c11_grid().into()),
    ];
    let mut unexpected = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let took = start.elapsed();
        let (tag, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::KnownFail(d) => ("FAIL", format!("{d} [known counterexample]")),
            Verdict::Fail(d) => {
                unexpected += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {title}: {detail} [{took:.2?}]", i + 1);
    }
    if unexpected > 0 {
        println!("{unexpected} criteria failed unexpectedly");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}

impl From<Outcome> for Verdict {
    fn from(o: Outcome) -> Self {
        match o {
            Ok(d) => Verdict::Pass(d),
            Err(d) => Verdict::Fail(d),
        }
    }
}
