use matchless_core::circle::{
    averaging_check, averaging_consistency, circle_bound_sweep, f_profile, incidence_check,
    ClaimStatus,
};
use matchless_core::gallery::{build, ConstructionSpec};
use matchless_core::invariants::matching_number;
use matchless_core::sampling::{random_monotone, seeded};
use matchless_core::stats::TupleMode;

#[test]
fn claim_exhaustive() {
    let mut checked = 0;
    for s in 3..=6 {
        for n_bar in s + 1..=14 {
            for r in 0..(1u32 << n_bar) {
                match f_profile(r, n_bar, s).claim {
                    ClaimStatus::Violated { t } => panic!("R={r:#b} n_bar={n_bar} s={s} t={t}"),
                    ClaimStatus::Holds { .. } => checked += 1,
                    ClaimStatus::Skipped { .. } => {}
                }
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn window_conservation_and_degree() {
    for s in 2..=6 {
        for n_bar in s..=12 {
            for r in 0..(1u32 << n_bar) {
                let w = f_profile(r, n_bar, s);
                assert_eq!(w.f.iter().sum::<usize>(), n_bar);
                let total: usize = w.f.iter().enumerate().map(|(b, c)| b * c).sum();
                assert_eq!(total, r.count_ones() as usize * s);
                if w.f[2..].iter().all(|&c| c == 0) {
                    assert_eq!(w.f[1], r.count_ones() as usize * s);
                }
            }
        }
    }
}

#[test]
fn circle_bound_over_permutations() {
    for (s, m) in [(5, 1), (4, 2)] {
        let f = build(&ConstructionSpec::P { s, m, l: 2 }).unwrap();
        let r = circle_bound_sweep(&f, s, m, 1000, 17).unwrap();
        assert!(r.passed(), "{r:?}");
        let mut rng = seeded(s as u64);
        for k in 0..10 {
            let g = random_monotone(&mut rng, s * m + s - 2, s);
            let r = circle_bound_sweep(&g, s, m, 100, k).unwrap();
            assert!(r.passed(), "{g:?} {r:?}");
        }
    }
}

#[test]
fn averaged_bound_on_random_families() {
    let mut rng = seeded(23);
    for _ in 0..100 {
        let f = random_monotone(&mut rng, 8, 5);
        assert!(matching_number(&f).nu < 5);
        assert!(averaging_check(&f, 5, 1, TupleMode::Exact)
            .unwrap()
            .passed());
    }
}

#[test]
fn incidence_counts() {
    for (s, m) in [(4, 1), (5, 1)] {
        let r = incidence_check(s, m).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn averaging_identity_n8() {
    let f = build(&ConstructionSpec::P { s: 5, m: 1, l: 2 }).unwrap();
    assert!(averaging_consistency(&f, 5, 1).unwrap().passed());
    let g = random_monotone(&mut seeded(8), 8, 5);
    assert!(averaging_consistency(&g, 5, 1).unwrap().passed());
}
