//! Exact maximization of families under a bounded-packing constraint, by
//! branch and bound over a structured search space.
//!
//! Every problem kind reduces to: pick a subfamily of a universe of sets,
//! forbidding `p` pairwise disjoint distinct members whose union has at most
//! `q` elements. Search spaces add implications ("if `A` is in, so is `B`")
//! that the search respects by deciding sets in a linear extension of them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num::{BigRational, ToPrimitive};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{params, Error, Result};
use crate::family::{check_ground, SetFamily, SubsetMask};
use crate::formulas::{binom, binom_rat, int_rat};
use crate::gallery::{preset_alpha, AlphaPreset, ThresholdVector};
use crate::invariants::{covering_number, has_d_property, matching_number};
use crate::params::KeyValues;
use crate::report::{Check, Report};
use crate::sampling::{for_each_upset, seeded};
use crate::stats::shape;

/// Largest universe the search accepts.
pub const MAX_UNIVERSE: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Problem {
    /// `max |F|`, `F ⊆ 2^[n]`, `ν(F) < s`.
    E { n: usize, s: usize },
    /// `max |F|` with the `D(s,q)` property.
    F { n: usize, q: usize, s: usize },
    /// `max |F|`, `F ⊆ ([n] choose k)`, `ν(F) < s`.
    EK { n: usize, k: usize, s: usize },
    /// `max |F|`, `F ⊆ ([n] choose k)`, `ν(F) = s`, `τ(F) > s`.
    #[serde(rename = "EK_TAU")]
    EkTau { n: usize, k: usize, s: usize },
    /// `E(n,s)` with members restricted to sizes `<= r`.
    #[serde(rename = "CAPPED")]
    Capped { n: usize, s: usize, r: usize },
}

impl Problem {
    pub fn n(&self) -> usize {
        match *self {
            Problem::E { n, .. }
            | Problem::F { n, .. }
            | Problem::EK { n, .. }
            | Problem::EkTau { n, .. }
            | Problem::Capped { n, .. } => n,
        }
    }

    pub fn s(&self) -> usize {
        match *self {
            Problem::E { s, .. }
            | Problem::F { s, .. }
            | Problem::EK { s, .. }
            | Problem::EkTau { s, .. }
            | Problem::Capped { s, .. } => s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_ground(self.n())?;
        if self.s() < 1 {
            return params("s must be at least 1");
        }
        match *self {
            Problem::EK { n, k, .. } | Problem::EkTau { n, k, .. } if k > n => {
                params(format!("k = {k} exceeds n = {n}"))
            }
            _ => Ok(()),
        }
    }

    /// `(p, q)`: no `p` pairwise disjoint distinct members with union of size `<= q`.
    fn packing(&self) -> (usize, usize) {
        match *self {
            Problem::E { n, s } | Problem::Capped { n, s, .. } | Problem::EK { n, s, .. } => (s, n),
            Problem::F { q, s, .. } => (s, q),
            Problem::EkTau { n, s, .. } => (s + 1, n),
        }
    }

    fn in_universe(&self, a: SubsetMask) -> bool {
        match *self {
            Problem::E { .. } | Problem::F { .. } => true,
            Problem::EK { k, .. } | Problem::EkTau { k, .. } => a.len() == k,
            Problem::Capped { r, .. } => a.len() <= r,
        }
    }

    fn is_uniform(&self) -> bool {
        matches!(self, Problem::EK { .. } | Problem::EkTau { .. })
    }

    /// Parses `E n=5 s=3`-style input: a kind plus `key=value` tokens.
    pub fn parse(kind: &str, kv: &KeyValues) -> Result<Self> {
        let p = match kind.to_ascii_uppercase().as_str() {
            "E" => {
                kv.only(&["n", "s"])?;
                Problem::E {
                    n: kv.usize("n")?,
                    s: kv.usize("s")?,
                }
            }
            "F" => {
                kv.only(&["n", "q", "s"])?;
                Problem::F {
                    n: kv.usize("n")?,
                    q: kv.usize("q")?,
                    s: kv.usize("s")?,
                }
            }
            "EK" => {
                kv.only(&["n", "k", "s"])?;
                Problem::EK {
                    n: kv.usize("n")?,
                    k: kv.usize("k")?,
                    s: kv.usize("s")?,
                }
            }
            "EK_TAU" | "EK-TAU" => {
                kv.only(&["n", "k", "s"])?;
                Problem::EkTau {
                    n: kv.usize("n")?,
                    k: kv.usize("k")?,
                    s: kv.usize("s")?,
                }
            }
            "CAPPED" => {
                kv.only(&["n", "s", "r"])?;
                Problem::Capped {
                    n: kv.usize("n")?,
                    s: kv.usize("s")?,
                    r: kv.usize("r")?,
                }
            }
            other => return params(format!("unknown problem kind {other:?}")),
        };
        p.validate()?;
        Ok(p)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Problem::E { n, s } => write!(f, "E({n},{s})"),
            Problem::F { n, q, s } => write!(f, "F({n},{q},{s})"),
            Problem::EK { n, k, s } => write!(f, "EK({n},{k},{s})"),
            Problem::EkTau { n, k, s } => write!(f, "EK_TAU({n},{k},{s})"),
            Problem::Capped { n, s, r } => write!(f, "CAPPED({n},{s},{r})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchSpace {
    All,
    Monotone,
    MonotoneShifted,
    UniformShifted,
}

impl SearchSpace {
    /// Why restricting to this space loses nothing.
    pub fn justification(&self) -> &'static str {
        match self {
            SearchSpace::All => "no restriction",
            SearchSpace::Monotone => {
                "adding supersets never creates a disjoint tuple with smaller union"
            }
            SearchSpace::MonotoneShifted => {
                "up-closure and shifting both preserve the packing constraint"
            }
            SearchSpace::UniformShifted => {
                "shifting preserves uniformity and never raises the matching number"
            }
        }
    }

    pub fn default_for(p: &Problem) -> Self {
        match p {
            Problem::EK { .. } => SearchSpace::UniformShifted,
            Problem::EkTau { .. } => SearchSpace::All,
            _ => SearchSpace::MonotoneShifted,
        }
    }

    pub fn check_valid_for(&self, p: &Problem) -> Result<()> {
        let ok = match (self, p) {
            (SearchSpace::All, _) => true,
            (SearchSpace::Monotone | SearchSpace::MonotoneShifted, q) => !q.is_uniform(),
            (SearchSpace::UniformShifted, Problem::EK { .. }) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            params(format!("search space {self} is not valid for {p}"))
        }
    }

    fn superset_implications(&self) -> bool {
        matches!(self, SearchSpace::Monotone | SearchSpace::MonotoneShifted)
    }

    fn shift_implications(&self) -> bool {
        matches!(
            self,
            SearchSpace::MonotoneShifted | SearchSpace::UniformShifted
        )
    }
}

impl fmt::Display for SearchSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchSpace::All => "all",
            SearchSpace::Monotone => "monotone",
            SearchSpace::MonotoneShifted => "monotone-shifted",
            SearchSpace::UniformShifted => "uniform-shifted",
        })
    }
}

impl FromStr for SearchSpace {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text.to_ascii_lowercase().replace('_', "-").as_str() {
            "all" => Ok(SearchSpace::All),
            "monotone" => Ok(SearchSpace::Monotone),
            "monotone-shifted" => Ok(SearchSpace::MonotoneShifted),
            "uniform-shifted" => Ok(SearchSpace::UniformShifted),
            other => params(format!("unknown search space {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub nodes: u64,
    pub time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            nodes: 100_000_000,
            time: Duration::from_secs(15 * 60),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    ProvedOptimal,
    BestFound,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub problem: Problem,
    pub space: SearchSpace,
    pub justification: &'static str,
    #[serde(serialize_with = "ser_to_string")]
    pub optimum: u64,
    #[serde(serialize_with = "ser_witness")]
    pub witness: SetFamily,
    pub nodes: u64,
    pub certificate: Certificate,
    /// No family in the space beats this; equals `optimum` when proved.
    #[serde(serialize_with = "ser_to_string")]
    pub upper_bound: u64,
}

fn ser_to_string<S: Serializer>(v: &u64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn ser_witness<S: Serializer>(f: &SetFamily, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::format::write_elements(f))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Open,
    In,
    Out,
}

enum Applied {
    Nothing,
    In {
        removed_from: usize,
        entered_mins: bool,
    },
    Out {
        trail_from: usize,
    },
}

struct Frame {
    idx: usize,
    next: u8,
    bound: usize,
    applied: Applied,
}

struct Search {
    n: usize,
    universe: Vec<u32>,
    dependents: Vec<Vec<usize>>,
    status: Vec<Status>,
    blocked: Vec<u32>,
    in_count: usize,
    out_count: usize,
    in_stack: Vec<usize>,
    /// Minimal nonempty members currently in.
    mins: Vec<u32>,
    removed: Vec<u32>,
    has_empty: bool,
    out_trail: Vec<usize>,
    p: usize,
    q: usize,
    /// `Some(s)` for the `ν = s`, `τ > s` kind.
    tau_above: Option<usize>,
    best: usize,
    best_witness: Vec<u32>,
    nodes: u64,
}

/// Universe in decision order: size descending, element sum ascending, mask.
/// Every implication points from a set to one earlier in this order.
fn universe_for(p: &Problem) -> Result<Vec<u32>> {
    let n = p.n();
    let size: u128 = match *p {
        Problem::EK { n, k, .. } | Problem::EkTau { n, k, .. } => {
            binom(n as i64, k as i64).to_u128().unwrap_or(u128::MAX)
        }
        Problem::Capped { n, r, .. } => (0..=r.min(n))
            .map(|k| binom(n as i64, k as i64).to_u128().unwrap())
            .sum(),
        _ => 1u128 << n,
    };
    if size > MAX_UNIVERSE as u128 {
        return Err(Error::Cap(format!(
            "{p} has {size} candidate sets; the search handles at most {MAX_UNIVERSE}"
        )));
    }
    let mut u: Vec<u32> = (0..1u32 << n)
        .filter(|&a| p.in_universe(SubsetMask(a)))
        .collect();
    u.sort_by_key(|&a| {
        (
            std::cmp::Reverse(a.count_ones()),
            SubsetMask(a).element_sum(),
            a,
        )
    });
    Ok(u)
}

impl Search {
    fn new(p: &Problem, space: SearchSpace) -> Result<Self> {
        let universe = universe_for(p)?;
        let index: HashMap<u32, usize> =
            universe.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let n = p.n();
        let mut dependents = vec![Vec::new(); universe.len()];
        for (i, &a) in universe.iter().enumerate() {
            let mut targets = Vec::new();
            if space.superset_implications() {
                for x in 0..n {
                    if a >> x & 1 == 0 {
                        targets.push(a | 1 << x);
                    }
                }
            }
            if space.shift_implications() {
                for j in 1..n {
                    if a >> j & 1 == 1 && a >> (j - 1) & 1 == 0 {
                        targets.push(a ^ (1 << j) ^ (1 << (j - 1)));
                    }
                }
            }
            for b in targets {
                if let Some(&k) = index.get(&b) {
                    debug_assert!(k < i);
                    dependents[k].push(i);
                }
            }
        }
        let (pp, q) = p.packing();
        let len = universe.len();
        Ok(Search {
            n,
            universe,
            dependents,
            status: vec![Status::Open; len],
            blocked: vec![0; len],
            in_count: 0,
            out_count: 0,
            in_stack: Vec::new(),
            mins: Vec::new(),
            removed: Vec::new(),
            has_empty: false,
            out_trail: Vec::new(),
            p: pp,
            q,
            tau_above: match *p {
                Problem::EkTau { s, .. } => Some(s),
                _ => None,
            },
            best: 0,
            best_witness: Vec::new(),
            nodes: 0,
        })
    }

    fn open(&self) -> usize {
        self.universe.len() - self.in_count - self.out_count
    }

    fn next_open(&self, from: usize) -> Option<usize> {
        (from..self.universe.len()).find(|&i| self.status[i] == Status::Open)
    }

    /// Whether adding `a` creates `p` disjoint distinct members with small union.
    fn creates_violation(&self, a: u32) -> bool {
        let size = a.count_ones() as usize;
        if size > self.q {
            return false;
        }
        if a == 0 {
            return self.p <= 1 || packs(&self.mins, 0, self.p - 1, self.q);
        }
        if self.mins.iter().any(|&m| m & !a == 0) {
            // a proper nonempty subset is already in; any tuple through `a` can use it
            return false;
        }
        let others = self.p - 1;
        if self.has_empty {
            if others == 0 {
                return true;
            }
            return packs(&self.mins, a, others - 1, self.q - size);
        }
        packs(&self.mins, a, others, self.q - size)
    }

    fn apply_in(&mut self, i: usize) -> Applied {
        let a = self.universe[i];
        self.status[i] = Status::In;
        self.in_count += 1;
        self.in_stack.push(i);
        let removed_from = self.removed.len();
        let mut entered_mins = false;
        if a == 0 {
            self.has_empty = true;
        } else if !self.mins.iter().any(|&m| m & !a == 0) {
            let mut k = 0;
            while k < self.mins.len() {
                if a & !self.mins[k] == 0 {
                    let m = self.mins.swap_remove(k);
                    self.removed.push(m);
                } else {
                    k += 1;
                }
            }
            self.mins.push(a);
            entered_mins = true;
        }
        Applied::In {
            removed_from,
            entered_mins,
        }
    }

    fn undo_in(&mut self, removed_from: usize, entered_mins: bool) {
        let i = self.in_stack.pop().expect("in stack");
        let a = self.universe[i];
        self.status[i] = Status::Open;
        self.in_count -= 1;
        if a == 0 {
            self.has_empty = false;
        } else if entered_mins {
            let pos = self
                .mins
                .iter()
                .rposition(|&m| m == a)
                .expect("min present");
            self.mins.swap_remove(pos);
            self.mins.extend(self.removed.drain(removed_from..));
        }
    }

    /// Marks `i` out and every set that depended on it.
    fn apply_out(&mut self, i: usize) -> Applied {
        let trail_from = self.out_trail.len();
        self.status[i] = Status::Out;
        self.out_count += 1;
        self.out_trail.push(i);
        let mut k = trail_from;
        while k < self.out_trail.len() {
            let x = self.out_trail[k];
            for d in 0..self.dependents[x].len() {
                let j = self.dependents[x][d];
                self.blocked[j] += 1;
                if self.blocked[j] == 1 && self.status[j] == Status::Open {
                    self.status[j] = Status::Out;
                    self.out_count += 1;
                    self.out_trail.push(j);
                }
            }
            k += 1;
        }
        Applied::Out { trail_from }
    }

    fn undo_out(&mut self, trail_from: usize) {
        while self.out_trail.len() > trail_from {
            let x = self.out_trail.pop().unwrap();
            for d in 0..self.dependents[x].len() {
                self.blocked[self.dependents[x][d]] -= 1;
            }
            self.status[x] = Status::Open;
            self.out_count -= 1;
        }
    }

    fn undo(&mut self, applied: Applied) {
        match applied {
            Applied::Nothing => {}
            Applied::In {
                removed_from,
                entered_mins,
            } => self.undo_in(removed_from, entered_mins),
            Applied::Out { trail_from } => self.undo_out(trail_from),
        }
    }

    fn in_masks(&self) -> Vec<u32> {
        self.in_stack.iter().map(|&i| self.universe[i]).collect()
    }

    fn feasible_now(&self) -> bool {
        match self.tau_above {
            None => true,
            Some(s) => {
                let masks = self.in_masks();
                !has_cover_within(&masks, s) && packs(&masks, 0, s, usize::MAX)
            }
        }
    }

    fn consider(&mut self) {
        if self.in_count > self.best && self.feasible_now() {
            self.best = self.in_count;
            self.best_witness = self.in_masks();
        }
    }

    /// Whether some completion of the current node can still be feasible.
    fn completion_possible(&self) -> bool {
        match self.tau_above {
            None => true,
            Some(s) => {
                let masks: Vec<u32> = (0..self.universe.len())
                    .filter(|&i| self.status[i] != Status::Out)
                    .map(|i| self.universe[i])
                    .collect();
                !has_cover_within(&masks, s) && packs(&masks, 0, s, usize::MAX)
            }
        }
    }

    /// Returns whether the search finished, plus the reached upper bound.
    fn run(&mut self, budget: Budget) -> (bool, usize) {
        let start = Instant::now();
        self.consider();
        let mut stack: Vec<Frame> = Vec::new();
        if let Some(i) = self.next_open(0) {
            stack.push(Frame {
                idx: i,
                next: 0,
                bound: self.in_count + self.open(),
                applied: Applied::Nothing,
            });
        }
        while !stack.is_empty() {
            let top = stack.len() - 1;
            let applied = std::mem::replace(&mut stack[top].applied, Applied::Nothing);
            self.undo(applied);
            let idx = stack[top].idx;
            match stack[top].next {
                0 => {
                    stack[top].next = 1;
                    if self.nodes >= budget.nodes
                        || (self.nodes.is_multiple_of(1024) && start.elapsed() >= budget.time)
                    {
                        let open = stack.iter().map(|f| f.bound).max().unwrap_or(0);
                        return (false, open.max(self.best));
                    }
                    self.nodes += 1;
                    if self.in_count + self.open() <= self.best || !self.completion_possible() {
                        stack[top].next = 2;
                        continue;
                    }
                    if self.creates_violation(self.universe[idx]) {
                        continue;
                    }
                    stack[top].applied = self.apply_in(idx);
                    self.consider();
                    if let Some(j) = self.next_open(idx + 1) {
                        let bound = self.in_count + self.open();
                        stack.push(Frame {
                            idx: j,
                            next: 0,
                            bound,
                            applied: Applied::Nothing,
                        });
                    }
                }
                1 => {
                    stack[top].next = 2;
                    stack[top].applied = self.apply_out(idx);
                    if self.in_count + self.open() <= self.best {
                        continue;
                    }
                    if let Some(j) = self.next_open(idx + 1) {
                        let bound = self.in_count + self.open();
                        stack.push(Frame {
                            idx: j,
                            next: 0,
                            bound,
                            applied: Applied::Nothing,
                        });
                    }
                }
                _ => {
                    stack.pop();
                }
            }
        }
        (true, self.best)
    }
}

/// `need` pairwise disjoint sets from `sets`, each avoiding `avoid`, with total size `<= room`.
fn packs(sets: &[u32], avoid: u32, need: usize, room: usize) -> bool {
    fn go(sets: &[u32], from: usize, used: u32, need: usize, room: usize) -> bool {
        if need == 0 {
            return true;
        }
        for k in from..sets.len() {
            let b = sets[k];
            let size = b.count_ones() as usize;
            if b & used == 0 && size <= room && go(sets, k + 1, used | b, need - 1, room - size) {
                return true;
            }
        }
        false
    }
    go(sets, 0, avoid, need, room)
}

/// Whether at most `budget` elements meet every set.
fn has_cover_within(sets: &[u32], budget: usize) -> bool {
    fn go(sets: &[u32], chosen: u32, budget: usize) -> bool {
        let Some(&target) = sets.iter().find(|&&a| a & chosen == 0) else {
            return true;
        };
        if budget == 0 || target == 0 {
            return false;
        }
        SubsetMask(target)
            .elements()
            .any(|x| go(sets, chosen | 1 << (x - 1), budget - 1))
    }
    go(sets, 0, budget)
}

pub fn solve_exact(p: &Problem, space: SearchSpace, budget: Budget) -> Result<SolveResult> {
    p.validate()?;
    space.check_valid_for(p)?;
    let mut search = Search::new(p, space)?;
    let (done, bound) = search.run(budget);
    let witness =
        SetFamily::from_masks(search.n, search.best_witness.iter().map(|&a| SubsetMask(a)));
    Ok(SolveResult {
        problem: *p,
        space,
        justification: space.justification(),
        optimum: search.best as u64,
        witness,
        nodes: search.nodes,
        certificate: if done {
            Certificate::ProvedOptimal
        } else {
            Certificate::BestFound
        },
        upper_bound: bound as u64,
    })
}

/// Whether `F` satisfies the problem's constraint (membership in the universe included).
pub fn satisfies(f: &SetFamily, p: &Problem) -> bool {
    if f.n() != p.n() || f.members().any(|a| !p.in_universe(a)) {
        return false;
    }
    match *p {
        Problem::E { s, .. } | Problem::EK { s, .. } | Problem::Capped { s, .. } => {
            matching_number(f).nu < s
        }
        Problem::F { q, s, .. } => has_d_property(f, s, q).holds,
        Problem::EkTau { s, .. } => {
            matching_number(f).nu == s && covering_number(f).map(|c| c.tau > s).unwrap_or(false)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleSpace {
    /// Every subfamily of the universe; universe of at most 20 sets.
    All,
    /// Every up-set of `2^[n]`, `n <= 6`, restricted to the universe.
    Monotone,
}

/// Optimum by plain enumeration and the invariants module, with no pruning.
pub fn brute_force_oracle(p: &Problem, space: OracleSpace) -> Result<u64> {
    p.validate()?;
    let n = p.n();
    let mut best = 0u64;
    match space {
        OracleSpace::All => {
            let universe: Vec<u32> = (0..1u32 << n)
                .filter(|&a| p.in_universe(SubsetMask(a)))
                .collect();
            if universe.len() > 20 {
                return Err(Error::Cap(format!(
                    "{} candidate sets is too many for full enumeration",
                    universe.len()
                )));
            }
            for pick in 0..1u64 << universe.len() {
                if pick.count_ones() as u64 <= best {
                    continue;
                }
                let f = SetFamily::from_masks(
                    n,
                    universe
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| pick >> i & 1 == 1)
                        .map(|(_, &a)| SubsetMask(a)),
                );
                if satisfies(&f, p) {
                    best = f.len();
                }
            }
        }
        OracleSpace::Monotone => {
            if n > 6 {
                return Err(Error::Cap("monotone enumeration is capped at n = 6".into()));
            }
            if p.is_uniform() {
                return params("monotone enumeration does not apply to uniform problems");
            }
            for_each_upset(n, |table| {
                let size = (table.count_ones()) as u64;
                if size <= best {
                    return;
                }
                let f = SetFamily::from_fn(n, |a| table >> a.0 & 1 == 1 && p.in_universe(a));
                if f.len() > best && satisfies(&f, p) {
                    best = f.len();
                }
            });
        }
    }
    Ok(best)
}

pub fn verify_witness(f: &SetFamily, p: &Problem) -> Report {
    let mut r = Report::new(format!("witness for {p}"));
    if f.n() != p.n() {
        r.push(Check::holds(
            "ground set",
            false,
            format!("family on [{}], problem on [{}]", f.n(), p.n()),
        ));
        return r;
    }
    let outside = f.members().find(|&a| !p.in_universe(a));
    r.push(Check::holds(
        "members in universe",
        outside.is_none(),
        outside
            .map(|a| format!("{a} is not allowed"))
            .unwrap_or_default(),
    ));
    let nu = matching_number(f);
    match *p {
        Problem::E { s, .. } | Problem::EK { s, .. } | Problem::Capped { s, .. } => {
            r.push(Check::holds(
                "nu < s",
                nu.nu < s,
                format!("nu = {}, s = {s}", nu.nu),
            ));
        }
        Problem::F { q, s, .. } => {
            let d = has_d_property(f, s, q);
            let detail = match &d.violating {
                None => String::new(),
                Some(t) => format!("disjoint tuple {t:?} has union of size <= {q}"),
            };
            r.push(Check::holds("D(s,q)", d.holds, detail));
        }
        Problem::EkTau { s, .. } => {
            r.push(Check::holds(
                "nu = s",
                nu.nu == s,
                format!("nu = {}", nu.nu),
            ));
            match covering_number(f) {
                Ok(c) => r.push(Check::holds(
                    "tau > s",
                    c.tau > s,
                    format!("tau = {}", c.tau),
                )),
                Err(e) => r.push(Check::holds("tau > s", false, e.to_string())),
            }
        }
    }
    r.push(Check::holds("size", true, format!("|F| = {}", f.len())));
    r
}

/// The three structural statements for near-optimal families on `n = sm+s−l`.
/// Violations are reported as failures, not errors.
pub fn check_structure(f: &SetFamily, s: usize, m: usize, l: usize) -> Result<Report> {
    if s < 2 || l < 1 || l > s || m < 1 {
        return params("needs s >= 2, m >= 1 and 1 <= l <= s");
    }
    if f.n() != s * m + s - l {
        return params(format!("n = {} but sm+s-l = {}", f.n(), s * m + s - l));
    }
    let lead = SubsetMask::prefix(l - 1);
    let mut r = Report::new(format!("structure s={s} m={m} l={l}"));
    let low = matching_number(&f.up_to_level(m));
    r.push(Check::holds(
        "nu(F_0..F_m) <= l-1",
        low.nu < l,
        format!("nu = {}, matching {:?}", low.nu, low.sets),
    ));
    let stray = f.level(m).members().find(|a| a.is_disjoint(lead));
    r.push(Check::holds(
        "F_m meets [l-1]",
        stray.is_none(),
        stray
            .map(|a| format!("{a} misses [1,{}]", l - 1))
            .unwrap_or_default(),
    ));
    for i in 1..m {
        let bad = f
            .level(m - i)
            .members()
            .find(|a| a.intersection(lead).len() < i + 1);
        r.push(Check::holds(
            format!("F_(m-{i}) has |F & [l-1]| >= {}", i + 1),
            bad.is_none(),
            bad.map(|a| format!("{a}")).unwrap_or_default(),
        ));
    }
    Ok(r)
}

/// `Σ_r y(r) >= C(n−1,m) + Σ_{r<m} C(n,r)` on `n = sm+s−2`.
pub fn deficiency_check(f: &SetFamily, s: usize, m: usize) -> Result<Report> {
    let n = f.n();
    if s < 2 || n != s * m + s - 2 {
        return params(format!("needs n = sm+s-2; got n = {n}, s = {s}, m = {m}"));
    }
    let mut r = Report::new(format!("deficiency s={s} m={m}"));
    let nu = matching_number(f).nu;
    if nu >= s {
        r.push(Check::skipped("deficiency", format!("nu = {nu} >= s")));
        return Ok(r);
    }
    let (n, m) = (n as i64, m as i64);
    let mut rhs = binom_rat(n - 1, m);
    for k in 0..m {
        rhs += binom_rat(n, k);
    }
    r.push(Check::at_least(
        "deficiency",
        int_rat(f.level_profile().missing()),
        rhs,
    ));
    Ok(r)
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdSearch {
    pub n: usize,
    pub s: usize,
    #[serde(serialize_with = "ser_alpha")]
    pub best: ThresholdVector,
    #[serde(serialize_with = "ser_to_string")]
    pub size: u64,
    /// Sizes of the preset starting points that were feasible.
    pub starts: Vec<(String, String)>,
    pub iterations: u64,
    pub seed: u64,
}

fn ser_alpha<S: Serializer>(a: &ThresholdVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(a)
}

/// Counts subsets with weight at least `t`.
pub fn threshold_size(w: &[u64], t: u64) -> u64 {
    let total: u64 = w.iter().sum();
    if t > total {
        return 0;
    }
    let mut ways = vec![0u64; total as usize + 1];
    ways[0] = 1;
    let mut reach = 0usize;
    for &x in w {
        let x = x as usize;
        for v in (0..=reach).rev() {
            if ways[v] != 0 {
                ways[v + x] += ways[v];
            }
        }
        reach += x;
    }
    ways[t as usize..].iter().sum()
}

fn to_vector(w: &[u64], t: u64) -> ThresholdVector {
    ThresholdVector::new(
        w.iter()
            .map(|&x| BigRational::new(x.into(), t.into()))
            .collect(),
    )
    .expect("sorted weights")
}

/// Seeded local search over integer weights `w` (nonincreasing) and threshold
/// `T` with `Σw < sT`, which keeps `ν(F(α)) < s`. Starts from the best
/// feasible preset vector.
pub fn threshold_search(n: usize, s: usize, iterations: u64, seed: u64) -> Result<ThresholdSearch> {
    check_ground(n)?;
    if s < 2 || n < 1 {
        return params("needs s >= 2 and n >= 1");
    }
    let mut starts: Vec<(String, Vec<u64>, u64)> = Vec::new();
    let (m, l) = shape(n, s);
    if m >= 1 {
        let a = preset_alpha(AlphaPreset::P { s, m, l })?;
        let (w, t) = a.integer_weights()?;
        starts.push((format!("alpha_p(s={s},m={m},l={l})"), w, t));
    }
    for mw in 1.. {
        if s * mw > n + 1 {
            break;
        }
        let a = preset_alpha(AlphaPreset::W { m: mw, s, n })?;
        let (w, t) = a.integer_weights()?;
        starts.push((format!("alpha_w(m={mw},s={s})"), w, t));
    }
    if starts.is_empty() {
        // n < s - 1: everything but the empty set
        starts.push(("all nonempty".into(), vec![1; n], 1));
    }
    let mut start_sizes = Vec::new();
    let mut best: Option<(Vec<u64>, u64, u64)> = None;
    for (label, w, t) in &starts {
        let size = threshold_size(w, *t);
        start_sizes.push((label.clone(), size.to_string()));
        if best.as_ref().is_none_or(|b| size > b.2) {
            best = Some((w.clone(), *t, size));
        }
    }
    let (mut w, mut t, mut size) = best.clone().unwrap();
    let mut rng = seeded(seed);
    for _ in 0..iterations {
        let (mut w2, mut t2) = (w.clone(), t);
        match rng.gen_range(0..10) {
            0 if t2 < 1 << 12 => {
                w2.iter_mut().for_each(|x| *x *= 2);
                t2 *= 2;
            }
            1..=4 => {
                let i = rng.gen_range(0..n);
                w2[i] += 1;
            }
            _ => {
                let i = rng.gen_range(0..n);
                if w2[i] == 0 {
                    continue;
                }
                w2[i] -= 1;
            }
        }
        w2.sort_unstable_by(|a, b| b.cmp(a));
        if w2.iter().sum::<u64>() >= s as u64 * t2 {
            continue;
        }
        let size2 = threshold_size(&w2, t2);
        if size2 >= size {
            (w, t, size) = (w2, t2, size2);
            if size > best.as_ref().unwrap().2 {
                best = Some((w.clone(), t, size));
            }
        }
    }
    let (bw, bt, bsize) = best.unwrap();
    Ok(ThresholdSearch {
        n,
        s,
        best: to_vector(&bw, bt),
        size: bsize,
        starts: start_sizes,
        iterations,
        seed,
    })
}
