//! Tuple-class densities `X_i(π)` over ordered tuples of pairwise disjoint
//! sets, and the identities and inequalities built on them.
//!
//! A tuple of type `π = (p_1,…,p_s)` is `(A_1,…,A_s)`, pairwise disjoint,
//! `|A_r| = p_r`. `X_i(π)` is the fraction of such tuples with exactly `i`
//! components outside `F`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{params, Error, Result};
use crate::family::{LevelProfile, SetFamily};
use crate::formulas::{binom, binom_rat, int_rat, rat};
use crate::invariants::matching_number;
use crate::report::{Check, Report};
use crate::sampling::seeded;

/// Largest exact enumeration accepted, in subset visits.
pub const EXACT_WORK_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.len() < 2 {
            return params("a partition needs at least two parts");
        }
        if parts.contains(&0) {
            return params("partition parts must be positive");
        }
        Ok(Partition { parts })
    }

    /// `π_e`: `s` parts of size `m`.
    pub fn equal(s: usize, m: usize) -> Result<Self> {
        Partition::new(vec![m; s])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn s(&self) -> usize {
        self.parts.len()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn is_equal(&self) -> bool {
        self.parts.iter().all(|&p| p == self.parts[0])
    }

    /// `n(π) = n! / ((n − Σp)! · Π p_r!)`.
    pub fn tuple_count(&self, n: usize) -> BigUint {
        if self.total() > n {
            return BigUint::zero();
        }
        let mut rest = n as i64;
        let mut count = BigUint::one();
        for &p in &self.parts {
            count *= binom(rest, p as i64);
            rest -= p as i64;
        }
        count
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parts = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Params(format!("bad partition part {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TupleMode {
    Exact,
    /// Uniform random tuples; estimates only, never used in assertions.
    Sample {
        trials: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TupleClassStats {
    pub partition: Partition,
    #[serde(serialize_with = "ser_display")]
    pub n_pi: BigUint,
    /// `c_i` for `i = 0..=s`: tuples (or trials) with `i` components outside `F`.
    #[serde(serialize_with = "ser_display_vec")]
    pub counts: Vec<BigUint>,
    /// `X_i = c_i / (tuples counted)`.
    #[serde(serialize_with = "ser_display_vec")]
    pub x: Vec<BigRational>,
    pub sampled: bool,
    pub trials: Option<u64>,
}

fn ser_display<T: fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn ser_display_vec<T: fmt::Display, S: serde::Serializer>(
    v: &[T],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl TupleClassStats {
    pub fn x(&self, i: usize) -> BigRational {
        self.x.get(i).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// Upper bound on subset visits of the exact enumeration.
pub fn exact_work(n: usize, pi: &Partition) -> u128 {
    let mut used = 0;
    let mut work = 0u128;
    for &p in pi.parts() {
        let states = binom(n as i64, used as i64);
        let step = binom((n - used) as i64, p as i64);
        work = work.saturating_add((states * step).to_u128().unwrap_or(u128::MAX));
        used += p;
    }
    work
}

/// Calls `visit` with every `k`-subset of `free`.
pub(crate) fn for_each_k_subset(free: u32, k: usize, visit: &mut impl FnMut(u32)) {
    fn go(free: u32, k: usize, acc: u32, visit: &mut impl FnMut(u32)) {
        if k == 0 {
            visit(acc);
            return;
        }
        if (free.count_ones() as usize) < k {
            return;
        }
        let low = free & free.wrapping_neg();
        go(free ^ low, k - 1, acc | low, visit);
        go(free ^ low, k, acc, visit);
    }
    go(free, k, 0, visit);
}

pub fn tuple_stats(f: &SetFamily, pi: &Partition, mode: TupleMode) -> Result<TupleClassStats> {
    let n = f.n();
    if pi.total() > n {
        return params(format!(
            "partition {pi} needs {} elements but n = {n}",
            pi.total()
        ));
    }
    let n_pi = pi.tuple_count(n);
    match mode {
        TupleMode::Exact => {
            let work = exact_work(n, pi);
            if work > EXACT_WORK_CAP {
                return Err(Error::Cap(format!(
                    "exact tuple enumeration needs ~{work} steps"
                )));
            }
            let counts = exact_counts(f, pi);
            let total: u128 = counts.iter().sum();
            if BigUint::from(total) != n_pi {
                return Err(Error::Params(format!(
                    "enumerated {total} tuples, expected {n_pi}"
                )));
            }
            Ok(finish(pi, n_pi, counts, None))
        }
        TupleMode::Sample { trials, seed } => {
            if trials == 0 {
                return params("sampling needs at least one trial");
            }
            let mut rng = seeded(seed);
            let mut order: Vec<u32> = (0..n as u32).collect();
            let mut counts = vec![0u128; pi.s() + 1];
            for _ in 0..trials {
                order.shuffle(&mut rng);
                let mut at = 0;
                let mut outside = 0;
                for &p in pi.parts() {
                    let a = order[at..at + p].iter().fold(0u32, |a, &x| a | 1 << x);
                    at += p;
                    outside += usize::from(!f.has(a));
                }
                counts[outside] += 1;
            }
            Ok(finish(pi, n_pi, counts, Some(trials)))
        }
    }
}

fn finish(
    pi: &Partition,
    n_pi: BigUint,
    counts: Vec<u128>,
    trials: Option<u64>,
) -> TupleClassStats {
    let denom: u128 = counts.iter().sum();
    let x = counts
        .iter()
        .map(|&c| BigRational::new(BigInt::from(c), BigInt::from(denom.max(1))))
        .collect();
    TupleClassStats {
        partition: pi.clone(),
        n_pi,
        counts: counts.into_iter().map(BigUint::from).collect(),
        x,
        sampled: trials.is_some(),
        trials,
    }
}

/// Forward pass over the parts: for every set of used elements, how many
/// partial tuples fill it with `j` components outside `F`.
fn exact_counts(f: &SetFamily, pi: &Partition) -> Vec<u128> {
    let s = pi.s();
    let full = crate::family::low_bits(f.n());
    let mut layer: HashMap<u32, Vec<u128>> = HashMap::new();
    let mut start = vec![0u128; s + 1];
    start[0] = 1;
    layer.insert(0, start);
    for &p in pi.parts() {
        let mut next: HashMap<u32, Vec<u128>> = HashMap::new();
        for (&used, counts) in &layer {
            for_each_k_subset(full & !used, p, &mut |a| {
                let shift = usize::from(!f.has(a));
                let slot = next.entry(used | a).or_insert_with(|| vec![0; s + 1]);
                for j in 0..s + 1 - shift {
                    slot[j + shift] += counts[j];
                }
            });
        }
        layer = next;
    }
    let mut out = vec![0u128; s + 1];
    for counts in layer.values() {
        for (o, c) in out.iter_mut().zip(counts) {
            *o += c;
        }
    }
    out
}

/// `(m, l)` with `n = s(m+1) − l` and `1 <= l <= s`.
pub fn shape(n: usize, s: usize) -> (usize, usize) {
    let m = n / s;
    (m, s * (m + 1) - n)
}

fn y(profile: &LevelProfile, q: usize) -> BigRational {
    int_rat(profile.y(q))
}

/// Everything the `π_e` checks need, computed once per family.
#[derive(Debug, Clone)]
pub struct EqualTupleView {
    pub n: usize,
    pub s: usize,
    pub m: usize,
    pub l: usize,
    pub nu: usize,
    pub y: LevelProfile,
    pub stats: TupleClassStats,
}

impl EqualTupleView {
    /// Requires `m >= 1`, i.e. `n >= s`.
    pub fn new(f: &SetFamily, s: usize) -> Result<Self> {
        if s < 2 {
            return params("s must be at least 2");
        }
        let n = f.n();
        let (m, l) = shape(n, s);
        if m == 0 {
            return params(format!("n = {n} < s = {s} leaves no equal partition"));
        }
        let stats = tuple_stats(f, &Partition::equal(s, m)?, TupleMode::Exact)?;
        Ok(EqualTupleView {
            n,
            s,
            m,
            l,
            nu: matching_number(f).nu,
            y: f.level_profile(),
            stats,
        })
    }

    fn x(&self, i: usize) -> BigRational {
        self.stats.x(i)
    }

    fn c(&self, k: usize) -> BigRational {
        binom_rat(self.n as i64, k as i64)
    }

    fn below(&self) -> bool {
        self.nu < self.s
    }

    fn reproducer(&self) -> String {
        format!("n={} s={} m={} l={}", self.n, self.s, self.m, self.l)
    }

    /// `y(m+u) >= (1/s)·C(n,m+u)·Σ_{i=1}^{⌊(s−l)/u⌋} X_i`.
    pub fn upper_level(&self, u: usize) -> Check {
        let label = format!("level m+u bound u={u}");
        if u == 0 || u + self.l > self.s {
            return Check::skipped(label, format!("needs 1 <= u <= s-l = {}", self.s - self.l));
        }
        if !self.below() {
            return Check::skipped(label, "nu >= s");
        }
        let top = (self.s - self.l) / u;
        let sum: BigRational = (1..=top).map(|i| self.x(i)).sum();
        let rhs = self.c(self.m + u) * sum / int_rat(self.s as i64);
        Check::at_least(label, y(&self.y, self.m + u), rhs).with_reproducer(self.reproducer())
    }

    /// `y(m) + ½y(m+1) + y(m+2) >= (1/s)·C(n,m)·(s−l+1 + Σ_{i=s−l+2}^{s} X_i)`.
    pub fn three_level(&self) -> Check {
        let label = "three-level bound";
        if self.s < 3 {
            return Check::skipped(label, "needs s >= 3");
        }
        if !self.below() {
            return Check::skipped(label, "nu >= s");
        }
        let (m, s, l) = (self.m, self.s, self.l);
        let lhs = y(&self.y, m) + y(&self.y, m + 1) * rat(1, 2) + y(&self.y, m + 2);
        let tail: BigRational = (s - l + 2..=s).map(|i| self.x(i)).sum();
        let rhs = self.c(m) / int_rat(s as i64) * (int_rat((s - l + 1) as i64) + tail);
        Check::at_least(label, lhs, rhs).with_reproducer(self.reproducer())
    }

    /// The `n = s(m+1) − 2`, `s >= 4` variant with the `X_1`/`X_s` bonus terms.
    pub fn three_level_two_short(&self) -> Check {
        let label = "three-level bound, l = 2";
        if self.s < 4 || self.l != 2 {
            return Check::skipped(label, "needs s >= 4 and n = s(m+1)-2");
        }
        if !self.below() {
            return Check::skipped(label, "nu >= s");
        }
        let (m, s) = (self.m, self.s);
        let coeff = (int_rat(s as i64) - rat(5, 2)) * self.c(m) / self.c(m + 1);
        let lhs = y(&self.y, m) + coeff * y(&self.y, m + 1) + y(&self.y, m + 2);
        let rhs = self.c(m) / int_rat(s as i64)
            * (int_rat(s as i64 - 1) + weighted_tuple_sum(&self.stats.x, s));
        Check::at_least(label, lhs, rhs).with_reproducer(self.reproducer())
    }

    /// `y(m−j) + (s−1)·C(n,m−j)/C(n,m+1)·y(m+1) >= C(n,m−j)` at `n = sm+s−2`.
    pub fn mixed_partition(&self, j: usize) -> Check {
        let label = format!("mixed partition bound j={j}");
        if self.l != 2 {
            return Check::skipped(label, "needs n = sm+s-2");
        }
        if j == 0 || j > self.m {
            return Check::skipped(label, format!("needs 1 <= j <= m = {}", self.m));
        }
        if !self.below() {
            return Check::skipped(label, "nu >= s");
        }
        mixed_partition_check(&self.y, self.n, self.s, self.m, j).with_reproducer(self.reproducer())
    }

    /// Tuple-density identities at `π_e` plus the level-`m` consequence.
    pub fn identities(&self) -> Report {
        let mut r = identity_checks(&self.stats, &self.y, self.n, self.nu);
        let sum_ix = weighted_sum(&self.stats.x);
        let rhs = self.c(self.m) / int_rat(self.s as i64) * sum_ix;
        r.push(Check::equal(
            "y(m) = C(n,m)/s * sum i X_i",
            y(&self.y, self.m),
            rhs,
        ));
        r
    }

    /// All `π_e` checks valid for this shape.
    pub fn all(&self) -> Report {
        let mut r = Report::new(format!("partition stats {}", self.reproducer()));
        r.extend(self.identities());
        for u in 1..=self.s - self.l {
            r.push(self.upper_level(u));
        }
        r.push(self.three_level());
        r.push(self.three_level_two_short());
        if self.l == 2 {
            for j in 1..=self.m {
                r.push(self.mixed_partition(j));
            }
        }
        r
    }
}

/// `X_1 + Σ_{i=1}^{s−2} (i − 3/2)·X_i + X_s`.
pub fn weighted_tuple_sum(x: &[BigRational], s: usize) -> BigRational {
    let at = |i: usize| x.get(i).cloned().unwrap_or_else(BigRational::zero);
    let mut total = at(1) + at(s);
    for i in 1..=s.saturating_sub(2) {
        total += (int_rat(i as i64) - rat(3, 2)) * at(i);
    }
    total
}

fn weighted_sum(x: &[BigRational]) -> BigRational {
    x.iter()
        .enumerate()
        .map(|(i, v)| int_rat(i as i64) * v)
        .sum()
}

fn mixed_partition_check(profile: &LevelProfile, n: usize, s: usize, m: usize, j: usize) -> Check {
    let (n, s, m, j) = (n as i64, s as i64, m as i64, j as i64);
    let lhs = y(profile, (m - j) as usize)
        + int_rat(s - 1) * binom_rat(n, m - j) / binom_rat(n, m + 1) * y(profile, (m + 1) as usize);
    Check::at_least(
        format!("mixed partition bound j={j}"),
        lhs,
        binom_rat(n, m - j),
    )
}

fn identity_checks(stats: &TupleClassStats, profile: &LevelProfile, n: usize, nu: usize) -> Report {
    let pi = &stats.partition;
    let s = pi.s();
    let mut r = Report::new(format!("identities pi={pi}"));
    let total: BigUint = stats.counts.iter().sum();
    r.push(Check::equal(
        "tuple count",
        int_rat(BigInt::from(total)),
        int_rat(BigInt::from(stats.n_pi.clone())),
    ));
    let sum_x: BigRational = stats.x.iter().sum();
    r.push(Check::equal("sum X_i = 1", sum_x, BigRational::one()));
    if nu < s {
        r.push(Check::equal("X_0 = 0", stats.x(0), BigRational::zero()));
    } else {
        r.push(Check::skipped("X_0 = 0", format!("nu = {nu} >= s = {s}")));
    }
    let rhs: BigRational = pi
        .parts()
        .iter()
        .map(|&p| y(profile, p) / binom_rat(n as i64, p as i64))
        .sum();
    r.push(Check::equal(
        "sum i X_i = sum y(p_r)/C(n,p_r)",
        weighted_sum(&stats.x),
        rhs,
    ));
    r
}

/// Tuple-density identities for an arbitrary partition; the `X_0` clause only when `ν < s`.
pub fn check_partition_identities(f: &SetFamily, pi: &Partition) -> Result<Report> {
    let stats = tuple_stats(f, pi, TupleMode::Exact)?;
    let nu = matching_number(f).nu;
    let mut r = identity_checks(&stats, &f.level_profile(), f.n(), nu);
    if pi.is_equal() && pi.total() == pi.s() * pi.parts()[0] {
        let m = pi.parts()[0];
        let rhs =
            binom_rat(f.n() as i64, m as i64) / int_rat(pi.s() as i64) * weighted_sum(&stats.x);
        r.push(Check::equal(
            "y(m) = C(n,m)/s * sum i X_i",
            y(&f.level_profile(), m),
            rhs,
        ));
    }
    Ok(r)
}

pub fn check_upper_level_bound(f: &SetFamily, s: usize, u: usize) -> Result<Report> {
    let view = EqualTupleView::new(f, s)?;
    let mut r = Report::new("level m+u bound");
    r.push(view.upper_level(u));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeLevelVariant {
    General,
    TwoShort,
}

pub fn check_three_level_bound(
    f: &SetFamily,
    s: usize,
    variant: ThreeLevelVariant,
) -> Result<Report> {
    let view = EqualTupleView::new(f, s)?;
    let mut r = Report::new("three-level bound");
    r.push(match variant {
        ThreeLevelVariant::General => view.three_level(),
        ThreeLevelVariant::TwoShort => view.three_level_two_short(),
    });
    Ok(r)
}

/// Needs no tuple enumeration: only the level profile.
pub fn check_mixed_partition_bound(f: &SetFamily, s: usize, j: usize) -> Result<Report> {
    let n = f.n();
    let (m, l) = shape(n, s);
    let mut r = Report::new("mixed partition bound");
    let label = format!("mixed partition bound j={j}");
    if l != 2 {
        r.push(Check::skipped(label, "needs n = sm+s-2"));
    } else if j == 0 || j > m {
        r.push(Check::skipped(label, format!("needs 1 <= j <= m = {m}")));
    } else if matching_number(f).nu >= s {
        r.push(Check::skipped(label, "nu >= s"));
    } else {
        r.push(mixed_partition_check(&f.level_profile(), n, s, m, j));
    }
    Ok(r)
}

/// The three binomial inequalities at `n = sm+s−l`, each under its own hypothesis.
pub fn check_binomial_inequalities(s: usize, m: usize, l: usize) -> Result<Report> {
    if s < 2 || l < 1 || l > s {
        return params("needs s >= 2 and 1 <= l <= s");
    }
    let (s, m, l) = (s as i64, m as i64, l as i64);
    let n = s * m + s - l;
    let c = |k: i64| binom_rat(n, k);
    let mut r = Report::new(format!("binomial inequalities s={s} m={m} l={l} n={n}"));
    if l == 2 && s >= 3 && m >= 1 {
        let mut lhs = (int_rat(s - 2) - rat(1, s - 2)) * c(m);
        for j in 1..=m {
            lhs += int_rat(s - 1) * c(m - j);
        }
        r.push(Check::at_most(
            "(s-2-1/(s-2))C(n,m) + (s-1)sum_j C(n,m-j) <= C(n,m+1)",
            lhs,
            c(m + 1),
        ));
    } else {
        r.push(Check::skipped(
            "(s-2-1/(s-2))C(n,m) + (s-1)sum_j C(n,m-j) <= C(n,m+1)",
            "needs l = 2, s >= 3, m >= 1",
        ));
    }
    if s >= 3 && l >= 2 && m >= 1 {
        r.push(Check::at_most(
            "(s-l)/2 C(n,m) <= C(n,m+2)",
            rat(s - l, 2) * c(m),
            c(m + 2),
        ));
    } else {
        r.push(Check::skipped(
            "(s-l)/2 C(n,m) <= C(n,m+2)",
            "needs s >= 3, s >= l >= 2, m >= 1",
        ));
    }
    r.push(Check::at_most(
        "(s-l) C(n,m) <= C(n,m+1)",
        int_rat(s - l) * c(m),
        c(m + 1),
    ));
    Ok(r)
}

/// `s·|∂H| >= |H|` for `ν(H) <= s`, `∅ ∉ H`.
pub fn check_shadow_inequality(h: &SetFamily, s: usize) -> Report {
    let mut r = Report::new("shadow inequality");
    let nu = matching_number(h).nu;
    if h.contains(crate::family::SubsetMask::EMPTY) {
        r.push(Check::skipped("s|shadow| >= |H|", "empty set is a member"));
    } else if nu > s {
        r.push(Check::skipped(
            "s|shadow| >= |H|",
            format!("nu = {nu} > s = {s}"),
        ));
    } else {
        let lhs = int_rat(s as i64) * int_rat(h.shadow().len());
        r.push(Check::at_least("s|shadow| >= |H|", lhs, int_rat(h.len())));
    }
    r
}

/// Every `π_e` check, the identities for the mixed partitions, and the shadow
/// inequality on `F` and on each of its levels.
pub fn sweep_checks(f: &SetFamily, s: usize) -> Result<Report> {
    let view = EqualTupleView::new(f, s)?;
    let mut r = view.all();
    if view.l == 2 {
        for j in 1..view.m {
            let mut parts = vec![view.m + 1; s];
            parts[0] = view.m - j;
            r.extend(check_partition_identities(f, &Partition::new(parts)?)?);
        }
    }
    r.extend(check_shadow_inequality(f, s));
    for k in 1..=f.n() {
        let level = f.level(k);
        if !level.is_empty() {
            r.extend(check_shadow_inequality(&level, s));
        }
    }
    Ok(r)
}
