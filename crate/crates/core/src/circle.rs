//! Circle arguments on `n = sm+s−2`: arcs of length `m` on a cyclic order,
//! their `d = gcd(m, s−2)` chains, window profiles `f_b`, the three-case
//! claim, the per-permutation inequality and its averaged form.
//!
//! Positions, arc indices and chain positions are 0-based here.

use std::collections::HashMap;

use itertools::Itertools;
use num::integer::gcd;
use num::{BigRational, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{params, Result};
use crate::family::SetFamily;
use crate::formulas::{int_rat, rat};
use crate::invariants::matching_number;
use crate::report::{Check, Report};
use crate::stats::{tuple_stats, weighted_tuple_sum, Partition, TupleMode};

/// Cyclic order: `order[i]` is the (0-based) element at position `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircularPermutation {
    order: Vec<usize>,
}

impl CircularPermutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &x in &order {
            if x >= order.len() || std::mem::replace(&mut seen[x], true) {
                return params(format!("{order:?} is not a permutation"));
            }
        }
        Ok(CircularPermutation { order })
    }

    pub fn identity(n: usize) -> Self {
        CircularPermutation {
            order: (0..n).collect(),
        }
    }

    pub fn random<R: Rng>(rng: &mut R, n: usize) -> Self {
        CircularPermutation {
            order: crate::sampling::random_permutation(rng, n),
        }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `D_i`: the `m` consecutive elements starting at position `i`.
    pub fn arc(&self, i: usize, m: usize) -> u32 {
        let n = self.n();
        (0..m).fold(0, |a, k| a | 1 << self.order[(i + k) % n])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcChainDecomposition {
    pub n: usize,
    pub d: usize,
    pub n_bar: usize,
    /// `chains[j][r]` is the arc index `j + r·m mod n`.
    pub chains: Vec<Vec<usize>>,
}

fn check_shape(n: usize, s: usize, m: usize) -> Result<()> {
    if s < 2 || m < 1 {
        return params("needs s >= 2 and m >= 1");
    }
    if n != s * m + s - 2 {
        return params(format!("n = {n} but sm+s-2 = {}", s * m + s - 2));
    }
    Ok(())
}

/// Chains depend only on `(s, m)`; the permutation enters through the arcs.
pub fn chain_decompose(n: usize, s: usize, m: usize) -> Result<ArcChainDecomposition> {
    check_shape(n, s, m)?;
    let d = gcd(m, s - 2);
    let n_bar = n / d;
    let chains = (0..d)
        .map(|j| (0..n_bar).map(|r| (j + r * m) % n).collect())
        .collect();
    Ok(ArcChainDecomposition {
        n,
        d,
        n_bar,
        chains,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimCase {
    /// `f_0 >= t`
    FewEmpty,
    /// `f_1 = 0`
    NoSingles,
    /// `f_2 >= 2`
    TwoDoubles,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum ClaimStatus {
    Holds { t: usize, cases: Vec<ClaimCase> },
    Violated { t: usize },
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowProfile {
    /// `f[b]` = number of windows `C_r = {r,…,r+s−1}` meeting `R` in `b` points.
    pub f: Vec<usize>,
    pub claim: ClaimStatus,
}

/// `R` is a bitmask over `Z_n̄`.
pub fn f_profile(r: u32, n_bar: usize, s: usize) -> WindowProfile {
    let mut f = vec![0; s + 1];
    for start in 0..n_bar {
        let window = (0..s).fold(0u32, |a, k| a | 1 << ((start + k) % n_bar));
        f[(window & r).count_ones() as usize] += 1;
    }
    let t = n_bar % s;
    let claim = if n_bar <= s {
        ClaimStatus::Skipped {
            reason: format!("n_bar = {n_bar} <= s = {s}"),
        }
    } else if t == 0 || t + 1 >= s {
        ClaimStatus::Skipped {
            reason: format!("t = n_bar mod s = {t} outside [1, s-2]"),
        }
    } else {
        let mut cases = Vec::new();
        if f[0] >= t {
            cases.push(ClaimCase::FewEmpty);
        }
        if f[1] == 0 {
            cases.push(ClaimCase::NoSingles);
        }
        if s >= 2 && f[2] >= 2 {
            cases.push(ClaimCase::TwoDoubles);
        }
        if cases.is_empty() {
            ClaimStatus::Violated { t }
        } else {
            ClaimStatus::Holds { t, cases }
        }
    };
    WindowProfile { f, claim }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainTrace {
    /// Chain positions `r` with `D_{j+rm} ∈ F`, as a mask over `Z_n̄`.
    pub r: u32,
    pub profile: WindowProfile,
    /// `x[i]` = windows of this chain with exactly `i` arcs outside `F`.
    pub x: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircleTrace {
    pub s: usize,
    pub m: usize,
    pub decomposition: ArcChainDecomposition,
    pub chains: Vec<ChainTrace>,
    pub x: Vec<usize>,
}

impl CircleTrace {
    /// `x_1 + Σ_{i=1}^{s−2} (i − 3/2)·x_i + x_s`.
    pub fn lhs(&self) -> BigRational {
        lhs_of(&self.x, self.s)
    }
}

fn lhs_of(x: &[usize], s: usize) -> BigRational {
    let x: Vec<BigRational> = x.iter().map(|&v| int_rat(v as i64)).collect();
    weighted_tuple_sum(&x, s)
}

pub fn x_profile(
    f: &SetFamily,
    sigma: &CircularPermutation,
    s: usize,
    m: usize,
) -> Result<CircleTrace> {
    let n = f.n();
    if sigma.n() != n {
        return params(format!("permutation of {} points on [{n}]", sigma.n()));
    }
    let decomposition = chain_decompose(n, s, m)?;
    let mut total = vec![0; s + 1];
    let chains = decomposition
        .chains
        .iter()
        .map(|chain| {
            let r = chain
                .iter()
                .enumerate()
                .filter(|&(_, &i)| f.has(sigma.arc(i, m)))
                .fold(0u32, |a, (pos, _)| a | 1 << pos);
            let profile = f_profile(r, decomposition.n_bar, s);
            let x: Vec<usize> = (0..=s).map(|i| profile.f[s - i]).collect();
            for (t, v) in total.iter_mut().zip(&x) {
                *t += v;
            }
            ChainTrace { r, profile, x }
        })
        .collect();
    Ok(CircleTrace {
        s,
        m,
        decomposition,
        chains,
        x: total,
    })
}

fn circle_bound_applies(s: usize, m: usize) -> std::result::Result<(), String> {
    if s >= 5 || (s == 4 && m.is_multiple_of(2)) {
        Ok(())
    } else {
        Err(format!(
            "needs s >= 5, or s = 4 with m even (s = {s}, m = {m})"
        ))
    }
}

fn circle_bound_checks(trace: &CircleTrace, r: &mut Report) {
    let s = trace.s;
    let d = trace.decomposition.d;
    r.push(Check::holds(
        "sum x_i = n",
        trace.x.iter().sum::<usize>() == trace.decomposition.n,
        "",
    ));
    r.push(Check::at_least(
        "circle bound",
        trace.lhs(),
        int_rat(s as i64 - 2),
    ));
    for (j, chain) in trace.chains.iter().enumerate() {
        let rhs = rat(s as i64 - 2, d as i64);
        r.push(Check::at_least(
            format!("chain {j} bound"),
            lhs_of(&chain.x, s),
            rhs,
        ));
    }
}

/// The per-permutation inequality and its per-chain refinement; `ν(F) < s` required.
pub fn check_circle_bound(
    f: &SetFamily,
    sigma: &CircularPermutation,
    s: usize,
    m: usize,
) -> Result<Report> {
    let trace = x_profile(f, sigma, s, m)?;
    let mut r = Report::new(format!(
        "circle bound s={s} m={m} sigma={:?}",
        sigma.order()
    ));
    if let Err(why) = circle_bound_applies(s, m) {
        r.push(Check::skipped("circle bound", why));
        return Ok(r);
    }
    let nu = matching_number(f).nu;
    if nu >= s {
        r.push(Check::skipped("circle bound", format!("nu = {nu} >= s")));
        return Ok(r);
    }
    circle_bound_checks(&trace, &mut r);
    Ok(r)
}

/// The circle bound over `trials` seeded random permutations plus the identity. One
/// aggregated check per label; the first violation is kept as reproducer.
pub fn circle_bound_sweep(
    f: &SetFamily,
    s: usize,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<Report> {
    check_shape(f.n(), s, m)?;
    let mut r = Report::new(format!(
        "circle bound sweep s={s} m={m} trials={trials} seed={seed}"
    ));
    if let Err(why) = circle_bound_applies(s, m) {
        r.push(Check::skipped("circle bound", why));
        return Ok(r);
    }
    let nu = matching_number(f).nu;
    if nu >= s {
        r.push(Check::skipped("circle bound", format!("nu = {nu} >= s")));
        return Ok(r);
    }
    let mut rng = crate::sampling::seeded(seed);
    let mut min_lhs: Option<BigRational> = None;
    let mut violation: Option<String> = None;
    let mut checked = 0;
    for k in 0..=trials {
        let sigma = if k == 0 {
            CircularPermutation::identity(f.n())
        } else {
            CircularPermutation::random(&mut rng, f.n())
        };
        let trace = x_profile(f, &sigma, s, m)?;
        let mut one = Report::new("");
        circle_bound_checks(&trace, &mut one);
        checked += 1;
        if violation.is_none() {
            if let Some(c) = one.failures().next() {
                violation = Some(format!(
                    "{} at sigma={:?}: {}",
                    c.label,
                    sigma.order(),
                    c.detail
                ));
            }
        }
        let lhs = trace.lhs();
        if min_lhs.as_ref().is_none_or(|v| lhs < *v) {
            min_lhs = Some(lhs);
        }
    }
    let detail = format!(
        "{checked} permutations, min LHS {}",
        min_lhs.clone().unwrap_or_else(BigRational::zero)
    );
    let mut c = Check::at_least(
        "circle bound over permutations",
        min_lhs.unwrap(),
        int_rat(s as i64 - 2),
    );
    if let Some(v) = violation {
        c = Check::holds("circle bound over permutations", false, v.clone())
            .with_reproducer(format!("seed={seed} {v}"));
    } else {
        c.detail = detail;
    }
    r.push(c);
    Ok(r)
}

/// The averaged inequality `X_1 + Σ (i − 3/2)X_i + X_s >= (s−2)/n` from exact
/// (or, flagged and unasserted, sampled) tuple densities.
pub fn averaging_check(f: &SetFamily, s: usize, m: usize, mode: TupleMode) -> Result<Report> {
    check_shape(f.n(), s, m)?;
    let mut r = Report::new(format!("averaged circle bound s={s} m={m}"));
    if let Err(why) = circle_bound_applies(s, m) {
        r.push(Check::skipped("averaged bound", why));
        return Ok(r);
    }
    let nu = matching_number(f).nu;
    if nu >= s {
        r.push(Check::skipped("averaged bound", format!("nu = {nu} >= s")));
        return Ok(r);
    }
    let stats = tuple_stats(f, &Partition::equal(s, m)?, mode)?;
    let lhs = weighted_tuple_sum(&stats.x, s);
    let rhs = rat(s as i64 - 2, f.n() as i64);
    if stats.sampled {
        r.push(Check::skipped(
            "averaged bound",
            format!("sampled estimate {lhs} vs {rhs}; not asserted"),
        ));
    } else {
        r.push(Check::at_least("averaged bound", lhs, rhs));
    }
    Ok(r)
}

/// Number of permutations of `[n]`, `n <= 10`.
const MAX_ENUMERATED_N: usize = 10;

/// For every ordered tuple of `s` disjoint `m`-sets, the number of
/// permutations whose window tuples include it; all must equal `n·(m!)^s·(s−2)!`.
pub fn incidence_check(s: usize, m: usize) -> Result<Report> {
    let n = s * m + s - 2;
    check_shape(n, s, m)?;
    if n > MAX_ENUMERATED_N {
        return params(format!(
            "n = {n} is too large for full permutation enumeration"
        ));
    }
    let decomposition = chain_decompose(n, s, m)?;
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for order in (0..n).permutations(n) {
        let sigma = CircularPermutation { order };
        for chain in &decomposition.chains {
            for start in 0..decomposition.n_bar {
                let tuple: Vec<u32> = (0..s)
                    .map(|k| sigma.arc(chain[(start + k) % decomposition.n_bar], m))
                    .collect();
                *counts.entry(tuple).or_default() += 1;
            }
        }
    }
    let factorial = |k: usize| (1..=k as u64).product::<u64>();
    let expected = n as u64 * factorial(m).pow(s as u32) * factorial(s - 2);
    let tuples = Partition::equal(s, m)?
        .tuple_count(n)
        .to_u64()
        .unwrap_or(u64::MAX);
    let mut r = Report::new(format!("incidence s={s} m={m} n={n}"));
    r.push(Check::equal(
        "every tuple covered",
        int_rat(counts.len() as i64),
        int_rat(tuples as i64),
    ));
    let bad = counts.iter().find(|(_, &c)| c != expected);
    let detail = match bad {
        None => format!(
            "all {} tuples lie in exactly {expected} window collections",
            counts.len()
        ),
        Some((t, c)) => format!("tuple {t:?} counted {c} times, expected {expected}"),
    };
    r.push(Check::holds(
        "uniform incidence count",
        bad.is_none(),
        detail,
    ));
    Ok(r)
}

/// `(1/n!)·Σ_σ LHS(σ) = n·(X_1 + Σ (i − 3/2)X_i + X_s)`, summing over every permutation.
pub fn averaging_consistency(f: &SetFamily, s: usize, m: usize) -> Result<Report> {
    let n = f.n();
    check_shape(n, s, m)?;
    if n > MAX_ENUMERATED_N {
        return params(format!(
            "n = {n} is too large for full permutation enumeration"
        ));
    }
    let mut sum = vec![0u64; s + 1];
    let mut perms = 0u64;
    for order in (0..n).permutations(n) {
        let trace = x_profile(f, &CircularPermutation { order }, s, m)?;
        for (a, b) in sum.iter_mut().zip(&trace.x) {
            *a += *b as u64;
        }
        perms += 1;
    }
    let mean: Vec<BigRational> = sum
        .iter()
        .map(|&v| BigRational::new(v.into(), perms.into()))
        .collect();
    let stats = tuple_stats(f, &Partition::equal(s, m)?, TupleMode::Exact)?;
    let mut r = Report::new(format!("averaging consistency s={s} m={m}"));
    r.push(Check::equal(
        "mean circle LHS = n * density LHS",
        weighted_tuple_sum(&mean, s),
        int_rat(n as i64) * weighted_tuple_sum(&stats.x, s),
    ));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build, ConstructionSpec};

    fn p(s: usize, m: usize, l: usize) -> SetFamily {
        build(&ConstructionSpec::P { s, m, l }).unwrap()
    }

    #[test]
    fn decompositions() {
        let c = chain_decompose(8, 5, 1).unwrap();
        assert_eq!((c.d, c.n_bar), (1, 8));
        assert_eq!(c.chains[0], (0..8).collect::<Vec<_>>());
        let c = chain_decompose(10, 4, 2).unwrap();
        assert_eq!((c.d, c.n_bar), (2, 5));
        assert_eq!(c.chains, vec![vec![0, 2, 4, 6, 8], vec![1, 3, 5, 7, 9]]);
        assert_eq!(chain_decompose(6, 4, 1).unwrap().n_bar, 6);
        assert!(chain_decompose(9, 4, 2).is_err());
    }

    #[test]
    fn chains_partition_arcs() {
        for s in 2..=6 {
            for m in 1..=5 {
                let n = s * m + s - 2;
                if n > 12 {
                    continue;
                }
                let c = chain_decompose(n, s, m).unwrap();
                let mut all: Vec<usize> = c.chains.concat();
                all.sort();
                assert_eq!(all, (0..n).collect::<Vec<_>>(), "s={s} m={m}");
                for chain in &c.chains {
                    assert_eq!((chain[c.n_bar - 1] + m) % n, chain[0], "chain closes");
                }
            }
        }
    }

    #[test]
    fn profile_examples() {
        let w = f_profile(0, 8, 5);
        assert_eq!(w.f[0], 8);
        assert!(
            matches!(w.claim, ClaimStatus::Holds { ref cases, .. } if cases.contains(&ClaimCase::NoSingles))
        );
        let w = f_profile(1, 8, 5);
        assert_eq!((w.f[0], w.f[1]), (3, 5));
        assert!(
            matches!(w.claim, ClaimStatus::Holds { t: 3, ref cases } if cases.contains(&ClaimCase::FewEmpty))
        );
        let w = f_profile(0b1_0001, 8, 5);
        assert_eq!(w.f.iter().sum::<usize>(), 8);
        assert!(matches!(
            f_profile(0, 10, 5).claim,
            ClaimStatus::Skipped { .. }
        ));
    }

    #[test]
    fn p512_identity_trace() {
        let f = p(5, 1, 2);
        let tr = x_profile(&f, &CircularPermutation::identity(8), 5, 1).unwrap();
        assert_eq!(tr.x, vec![0, 0, 0, 0, 5, 3]);
        assert_eq!(tr.lhs(), int_rat(3));
        let r = check_circle_bound(&f, &CircularPermutation::identity(8), 5, 1).unwrap();
        assert!(r.passed());
        assert!(r.get("circle bound").unwrap().tight);
    }

    #[test]
    fn extreme_traces() {
        let full_m = SetFamily::from_fn(8, |a| !a.is_empty());
        assert_eq!(
            x_profile(&full_m, &CircularPermutation::identity(8), 5, 1)
                .unwrap()
                .x[0],
            8
        );
        let none = SetFamily::from_fn(8, |a| a.len() >= 2);
        assert_eq!(
            x_profile(&none, &CircularPermutation::identity(8), 5, 1)
                .unwrap()
                .x[5],
            8
        );
    }

    #[test]
    fn circle_bound_parity_gate() {
        let f = p(4, 1, 2);
        let r = check_circle_bound(&f, &CircularPermutation::identity(6), 4, 1).unwrap();
        assert_eq!(r.checks[0].outcome, crate::report::Outcome::Skipped);
        let f = p(4, 2, 2);
        let r = check_circle_bound(&f, &CircularPermutation::identity(10), 4, 2).unwrap();
        assert!(r.passed());
        assert_eq!(r.get("chain 1 bound").unwrap().rhs, Some(int_rat(1)));
    }

    #[test]
    fn averaged_fixture() {
        let r = averaging_check(&p(5, 1, 2), 5, 1, TupleMode::Exact).unwrap();
        let c = r.get("averaged bound").unwrap();
        assert!(c.passed() && c.tight);
        assert_eq!(c.lhs, Some(rat(3, 8)));
        let none = SetFamily::from_fn(8, |a| a.len() >= 2);
        assert!(averaging_check(&none, 5, 1, TupleMode::Exact)
            .unwrap()
            .passed());
    }

    #[test]
    fn incidence_small() {
        let r = incidence_check(4, 1).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn consistency_small() {
        assert!(averaging_consistency(&p(4, 1, 2), 4, 1).unwrap().passed());
        let mut rng = crate::sampling::seeded(2);
        let f = crate::sampling::random_family(&mut rng, 6);
        assert!(averaging_consistency(&f, 4, 1).unwrap().passed());
    }

    #[test]
    fn bad_sigma_rejected() {
        assert!(CircularPermutation::new(vec![0, 0, 1]).is_err());
        assert!(CircularPermutation::new(vec![2, 0, 1]).is_ok());
    }
}
