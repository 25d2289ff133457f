use matchless_core::formulas::{emc_value, p_conjectured_value};
use matchless_core::gallery::{build, p_size, ConstructionSpec};
use matchless_core::solver::{
    brute_force_oracle, check_structure, solve_exact, threshold_search, verify_witness, Budget,
    Certificate, OracleSpace, Problem, SearchSpace,
};
use num::BigUint;

fn solve(p: Problem, space: SearchSpace) -> matchless_core::solver::SolveResult {
    let r = solve_exact(&p, space, Budget::default()).unwrap();
    assert_eq!(r.certificate, Certificate::ProvedOptimal, "{p}");
    assert!(verify_witness(&r.witness, &p).passed(), "{p}");
    assert_eq!(r.witness.len(), r.optimum);
    r
}

#[test]
fn shifted_space_matches_full_enumeration() {
    for n in 1..=4 {
        for s in 1..=5 {
            let p = Problem::E { n, s };
            let shifted = solve(p, SearchSpace::MonotoneShifted).optimum;
            assert_eq!(
                shifted,
                brute_force_oracle(&p, OracleSpace::All).unwrap(),
                "{p}"
            );
            assert_eq!(shifted, solve(p, SearchSpace::All).optimum, "{p}");
        }
    }
}

#[test]
fn monotone_spaces_match_upset_enumeration() {
    for n in 1..=5 {
        for s in 1..=4 {
            let p = Problem::E { n, s };
            let oracle = brute_force_oracle(&p, OracleSpace::Monotone).unwrap();
            assert_eq!(
                solve(p, SearchSpace::MonotoneShifted).optimum,
                oracle,
                "{p}"
            );
            assert_eq!(solve(p, SearchSpace::Monotone).optimum, oracle, "{p}");
            for q in 0..=n {
                let f = Problem::F { n, q, s };
                let oracle = brute_force_oracle(&f, OracleSpace::Monotone).unwrap();
                assert_eq!(
                    solve(f, SearchSpace::MonotoneShifted).optimum,
                    oracle,
                    "{f}"
                );
            }
            for r in 0..=n {
                let c = Problem::Capped { n, s, r };
                assert_eq!(
                    solve(c, SearchSpace::MonotoneShifted).optimum,
                    brute_force_oracle(&c, OracleSpace::Monotone).unwrap(),
                    "{c}"
                );
            }
        }
    }
}

#[test]
fn e_values_at_six_match_upsets() {
    for s in 2..=4 {
        let p = Problem::E { n: 6, s };
        assert_eq!(
            solve(p, SearchSpace::MonotoneShifted).optimum,
            brute_force_oracle(&p, OracleSpace::Monotone).unwrap()
        );
    }
}

#[test]
fn uniform_shifted_matches_all() {
    for n in 2..=7 {
        for k in 1..=3.min(n) {
            for s in 1..=3 {
                let p = Problem::EK { n, k, s };
                let a = solve(p, SearchSpace::All).optimum;
                let b = solve(p, SearchSpace::UniformShifted).optimum;
                assert_eq!(a, b, "{p}");
                // never above (s-1)·C(n-1,k-1) once n >= sk
                if n >= s * k {
                    let cap = (s as u64 - 1) * binom(n - 1, k - 1);
                    assert!(b <= cap, "{p}");
                }
                if s >= 2 {
                    let emc = emc_value(n as i64, k as i64, s as i64).unwrap();
                    if emc.guaranteed {
                        assert_eq!(emc.value, num::BigInt::from(b), "{p}");
                    }
                }
            }
        }
    }
}

fn binom(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

#[test]
fn p_family_grid_up_to_eight() {
    for n in 2..=8usize {
        for s in 2..=n {
            let m = n / s;
            let l = s * (m + 1) - n;
            if m < 1 {
                continue;
            }
            let r = solve(Problem::E { n, s }, SearchSpace::MonotoneShifted);
            let expected = p_conjectured_value(s as i64, m as i64, l as i64).unwrap();
            let p = p_size(s as i64, m as i64, l as i64);
            if expected.guaranteed {
                assert_eq!(BigUint::from(r.optimum), expected.value, "n={n} s={s}");
            }
            assert!(BigUint::from(r.optimum) >= p, "n={n} s={s}");
            if l < s {
                let st = check_structure(&r.witness, s, m, l).unwrap();
                assert!(st.passed(), "n={n} s={s}: {st:?}");
            }
        }
    }
}

#[test]
fn another_optimum_breaks_low_level_matching_bound() {
    // all sets meeting {1,2} on [4]: also 12 members with nu = 2, but two disjoint singletons
    let f = matchless_core::SetFamily::from_fn(4, |a| a.0 & 0b11 != 0);
    assert!(verify_witness(&f, &Problem::E { n: 4, s: 3 }).passed());
    assert_eq!(f.len(), 12);
    let st = check_structure(&f, 3, 1, 2).unwrap();
    assert!(st.get("nu(F_0..F_m) <= l-1").unwrap().failed());
}

#[test]
fn structure_of_p_witnesses() {
    for (s, m, l) in [(3, 1, 2), (4, 1, 2), (3, 2, 2), (5, 1, 3), (4, 1, 3)] {
        let f = build(&ConstructionSpec::P { s, m, l }).unwrap();
        assert!(
            check_structure(&f, s, m, l).unwrap().passed(),
            "P({s},{m},{l})"
        );
    }
}

#[test]
fn threshold_never_beats_exact() {
    for n in 3..=7 {
        for s in 2..=4 {
            let t = threshold_search(n, s, 300, 5).unwrap();
            let e = solve(Problem::E { n, s }, SearchSpace::MonotoneShifted).optimum;
            assert!(t.size <= e, "n={n} s={s}");
        }
    }
}
