//! Subsets of `[n]`, dense set families over `2^[n]`, and the structural
//! operators on them: complement, level profile, upward closure, `(i,j)`-shifts,
//! immediate shadow, links and element splits.
//!
//! Elements are 1-based at every public boundary; element `x` lives at bit `x - 1`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_N: usize = 24;

/// A subset of `[n]` as a bit mask: bit `i - 1` is set iff `i` is in the subset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elements: I) -> Result<Self> {
        let mut bits = 0u32;
        for x in elements {
            if x == 0 || x > n {
                return Err(Error::ElementOutOfRange { element: x, n });
            }
            bits |= 1 << (x - 1);
        }
        Ok(SubsetMask(bits))
    }

    /// The interval `[a, b]`; empty when `a > b`.
    pub fn interval(a: usize, b: usize) -> Self {
        if a > b || b == 0 {
            return SubsetMask::EMPTY;
        }
        let a = a.max(1);
        SubsetMask(low_bits(b) & !low_bits(a - 1))
    }

    /// The initial segment `[k]`.
    pub fn prefix(k: usize) -> Self {
        SubsetMask(low_bits(k))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, x: usize) -> bool {
        (1..=32).contains(&x) && self.0 & (1 << (x - 1)) != 0
    }

    pub fn with(self, x: usize) -> Self {
        SubsetMask(self.0 | 1 << (x - 1))
    }

    pub fn without(self, x: usize) -> Self {
        SubsetMask(self.0 & !(1 << (x - 1)))
    }

    pub fn union(self, other: Self) -> Self {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        SubsetMask(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        SubsetMask(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// True iff no bit at position `>= n` is set.
    pub fn fits(self, n: usize) -> bool {
        self.0 & !low_bits(n) == 0
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(b + 1)
        })
    }

    pub fn element_sum(self) -> usize {
        self.elements().sum()
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, x) in self.elements().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl serde::Serialize for SubsetMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) fn low_bits(k: usize) -> u32 {
    if k >= 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}

pub fn check_ground(n: usize) -> Result<()> {
    if n > MAX_N {
        Err(Error::GroundSize(n))
    } else {
        Ok(())
    }
}

/// A family of subsets of `[n]`, stored as a dense membership table over all
/// `2^n` masks. Immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct SetFamily {
    n: usize,
    words: Vec<u64>,
    levels: Vec<u64>,
}

impl SetFamily {
    fn from_words(n: usize, words: Vec<u64>) -> Self {
        let mut levels = vec![0u64; n + 1];
        for (w, &word) in words.iter().enumerate() {
            let mut rest = word;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                levels[((w << 6) | b).count_ones() as usize] += 1;
            }
        }
        SetFamily { n, words, levels }
    }

    fn blank_words(n: usize) -> Vec<u64> {
        assert!(n <= MAX_N, "ground set size {n} exceeds {MAX_N}");
        vec![0u64; (1usize << n).div_ceil(64)]
    }

    pub fn empty(n: usize) -> Self {
        Self::from_words(n, Self::blank_words(n))
    }

    /// The full power set `2^[n]`.
    pub fn full(n: usize) -> Self {
        Self::from_fn(n, |_| true)
    }

    /// `([n] choose k)`.
    pub fn uniform(n: usize, k: usize) -> Self {
        Self::from_fn(n, |m| m.len() == k)
    }

    pub fn from_fn(n: usize, mut member: impl FnMut(SubsetMask) -> bool) -> Self {
        let mut words = Self::blank_words(n);
        for m in 0..(1u32 << n) {
            if member(SubsetMask(m)) {
                words[(m >> 6) as usize] |= 1 << (m & 63);
            }
        }
        Self::from_words(n, words)
    }

    /// Panics if a mask does not fit in `[n]`.
    pub fn from_masks<I: IntoIterator<Item = SubsetMask>>(n: usize, masks: I) -> Self {
        let mut words = Self::blank_words(n);
        for m in masks {
            assert!(m.fits(n), "mask {m} does not fit in [{n}]");
            words[(m.0 >> 6) as usize] |= 1 << (m.0 & 63);
        }
        Self::from_words(n, words)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> u64 {
        self.levels.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, m: SubsetMask) -> bool {
        m.fits(self.n) && self.has(m.0)
    }

    #[inline]
    pub(crate) fn has(&self, m: u32) -> bool {
        self.words[(m >> 6) as usize] >> (m & 63) & 1 == 1
    }

    /// Number of members of each size `0..=n`.
    pub fn level_counts(&self) -> &[u64] {
        &self.levels
    }

    /// Members in increasing mask order.
    pub fn members(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some(SubsetMask(((w as u32) << 6) | b))
            })
        })
    }

    pub fn masks(&self) -> Vec<u32> {
        self.members().map(|m| m.0).collect()
    }

    /// `F ∩ ([n] choose k)`.
    pub fn level(&self, k: usize) -> SetFamily {
        SetFamily::from_masks(self.n, self.members().filter(|m| m.len() == k))
    }

    /// Union of all members of size at most `k`.
    pub fn up_to_level(&self, k: usize) -> SetFamily {
        SetFamily::from_masks(self.n, self.members().filter(|m| m.len() <= k))
    }

    pub fn is_uniform(&self, k: usize) -> bool {
        self.levels
            .iter()
            .enumerate()
            .all(|(q, &c)| q == k || c == 0)
    }

    pub fn union(&self, other: &SetFamily) -> SetFamily {
        assert_eq!(self.n, other.n);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        SetFamily::from_words(self.n, words)
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// `2^[n] − F`.
    pub fn complement(&self) -> SetFamily {
        let total = 1usize << self.n;
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if total < 64 {
            words[0] &= (1u64 << total) - 1;
        }
        SetFamily::from_words(self.n, words)
    }

    pub fn level_profile(&self) -> LevelProfile {
        let y = (0..=self.n)
            .map(|q| binomial_u64(self.n, q) - self.levels[q])
            .collect();
        LevelProfile { y }
    }

    pub fn is_upward_closed(&self) -> bool {
        self.members()
            .all(|m| (0..self.n).all(|b| self.has(m.0 | 1 << b)))
    }

    /// The smallest upward-closed family containing `F`.
    pub fn upward_closure(&self) -> SetFamily {
        let mut words = self.words.clone();
        for m in 0..(1u32 << self.n) {
            if words[(m >> 6) as usize] >> (m & 63) & 1 == 0 {
                continue;
            }
            for b in 0..self.n {
                let up = m | 1 << b;
                words[(up >> 6) as usize] |= 1 << (up & 63);
            }
        }
        SetFamily::from_words(self.n, words)
    }

    /// The `(i,j)`-shift `S_{i,j}(F)`: every member containing `j` but not `i`
    /// moves to `(A − {j}) ∪ {i}` unless that image is already present.
    pub fn shift(&self, i: usize, j: usize) -> Result<SetFamily> {
        if i == 0 || i >= j || j > self.n {
            return Err(Error::ShiftPair { i, j, n: self.n });
        }
        let (bi, bj) = (1u32 << (i - 1), 1u32 << (j - 1));
        let mut words = Self::blank_words(self.n);
        for a in self.members() {
            let a = a.0;
            let image = if a & bj != 0 && a & bi == 0 {
                (a & !bj) | bi
            } else {
                a
            };
            let target = if image != a && !self.has(image) {
                image
            } else {
                a
            };
            words[(target >> 6) as usize] |= 1 << (target & 63);
        }
        Ok(SetFamily::from_words(self.n, words))
    }

    /// True iff `S_{i,j}(F) = F` for every `1 <= i < j <= n`.
    ///
    /// Closure under the adjacent shifts `S_{j-1,j}` generates closure under
    /// all of them, so only adjacent pairs are inspected.
    pub fn is_shifted(&self) -> bool {
        self.members().all(|a| {
            (1..self.n).all(|b| {
                // element b+1 present, element b absent
                let (lo, hi) = (1u32 << (b - 1), 1u32 << b);
                a.0 & hi == 0 || a.0 & lo != 0 || self.has((a.0 & !hi) | lo)
            })
        })
    }

    /// Applies `(i,j)`-shifts in lexicographic order of `(i,j)`, sweeping until
    /// a full sweep changes nothing.
    pub fn full_shift(&self) -> FullShift {
        let input_was_shifted = self.is_shifted();
        let mut family = self.clone();
        let mut changing_shifts = 0;
        loop {
            let mut changed = false;
            for i in 1..=self.n {
                for j in i + 1..=self.n {
                    let next = family.shift(i, j).expect("valid pair");
                    if next != family {
                        family = next;
                        changed = true;
                        changing_shifts += 1;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        FullShift {
            family,
            input_was_shifted,
            changing_shifts,
        }
    }

    /// Immediate shadow: all sets obtained from a member by deleting one element.
    pub fn shadow(&self) -> SetFamily {
        let mut words = Self::blank_words(self.n);
        for a in self.members() {
            for x in a.elements() {
                let b = a.0 & !(1 << (x - 1));
                words[(b >> 6) as usize] |= 1 << (b & 63);
            }
        }
        SetFamily::from_words(self.n, words)
    }

    /// `G(Q,p) = {G ∖ Q : G ∈ G, G ∩ [1,p] = Q}`, kept on the same ground set.
    pub fn link(&self, q: SubsetMask, p: usize) -> Result<SetFamily> {
        if p > self.n {
            return Err(Error::ElementOutOfRange {
                element: p,
                n: self.n,
            });
        }
        let head = SubsetMask::prefix(p);
        if !q.is_subset_of(head) {
            return Err(Error::LinkPrefix {
                q: q.to_string(),
                p,
            });
        }
        Ok(SetFamily::from_masks(
            self.n,
            self.members()
                .filter(|g| g.intersection(head) == q)
                .map(|g| g.difference(q)),
        ))
    }

    /// Splits on element `x`, returning `(F(x), F(x̄))` on `[n−1]`:
    /// `F(x) = {A − {x} : x ∈ A ∈ F}` and `F(x̄) = {A ∈ F : x ∉ A}`.
    /// Elements above `x` are relabelled down by one, so for `x = n` no
    /// relabelling happens.
    pub fn split_on(&self, x: usize) -> Result<(SetFamily, SetFamily)> {
        if x == 0 || x > self.n {
            return Err(Error::ElementOutOfRange {
                element: x,
                n: self.n,
            });
        }
        let bit = 1u32 << (x - 1);
        let below = bit - 1;
        let squeeze = |a: u32| (a & below) | ((a >> x) << (x - 1));
        let (mut with, mut without) = (Vec::new(), Vec::new());
        for a in self.members() {
            if a.0 & bit != 0 {
                with.push(SubsetMask(squeeze(a.0)));
            } else {
                without.push(SubsetMask(squeeze(a.0)));
            }
        }
        Ok((
            SetFamily::from_masks(self.n - 1, with),
            SetFamily::from_masks(self.n - 1, without),
        ))
    }

    /// Inverse of [`SetFamily::split_on`] for `x = n + 1`.
    pub fn join_on_last(with: &SetFamily, without: &SetFamily) -> SetFamily {
        assert_eq!(with.n, without.n);
        let n = with.n + 1;
        let top = 1u32 << with.n;
        SetFamily::from_masks(
            n,
            with.members()
                .map(|a| SubsetMask(a.0 | top))
                .chain(without.members()),
        )
    }

    /// Members that contain no other member, ignoring `∅`.
    pub fn minimal_nonempty_members(&self) -> Vec<u32> {
        let total = 1usize << self.n;
        // below[m]: some nonempty member is a proper subset of m
        let mut below = vec![false; total];
        let mut out = Vec::new();
        for m in 1..total as u32 {
            let mut hit = false;
            let mut rest = m;
            while rest != 0 {
                let b = rest & rest.wrapping_neg();
                rest ^= b;
                let sub = m ^ b;
                if sub != 0 && (self.has(sub) || below[sub as usize]) {
                    hit = true;
                    break;
                }
            }
            below[m as usize] = hit;
            if !hit && self.has(m) {
                out.push(m);
            }
        }
        out
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFamily(n={}, ", self.n)?;
        f.debug_set().entries(self.members()).finish()?;
        f.write_str(")")
    }
}

/// Result of [`SetFamily::full_shift`].
#[derive(Debug, Clone)]
pub struct FullShift {
    pub family: SetFamily,
    pub input_was_shifted: bool,
    pub changing_shifts: usize,
}

/// `y[q]` = number of `q`-subsets missing from a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    pub y: Vec<u64>,
}

impl LevelProfile {
    /// `y(q)`, zero beyond `n`.
    pub fn y(&self, q: usize) -> u64 {
        self.y.get(q).copied().unwrap_or(0)
    }

    pub fn missing(&self) -> u64 {
        self.y.iter().sum()
    }
}

pub(crate) fn binomial_u64(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_masks(
            n,
            sets.iter()
                .map(|s| SubsetMask::from_elements(n, s.iter().copied()).unwrap()),
        )
    }

    /// `{1}` together with every set of size at least two.
    fn p312() -> SetFamily {
        SetFamily::from_fn(4, |m| m.len() >= 2 || m == SubsetMask(1))
    }

    #[test]
    fn mask_basics() {
        let m = SubsetMask::from_elements(5, [1, 3, 5]).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.elements().collect::<Vec<_>>(), vec![1, 3, 5]);
        assert_eq!(m.to_string(), "{1,3,5}");
        assert_eq!(SubsetMask::EMPTY.to_string(), "{}");
        assert_eq!(
            SubsetMask::interval(2, 4),
            SubsetMask::from_elements(4, [2, 3, 4]).unwrap()
        );
        assert!(SubsetMask::interval(3, 2).is_empty());
        assert!(SubsetMask::from_elements(3, [4]).is_err());
        assert!(!SubsetMask(0b1000).fits(3));
    }

    #[test]
    fn complement_examples() {
        assert!(SetFamily::full(2).complement().is_empty());
        let f = fam(1, &[&[]]);
        assert_eq!(f.complement(), fam(1, &[&[1]]));
        let c = p312().complement();
        assert_eq!(c, fam(4, &[&[], &[2], &[3], &[4]]));
        assert_eq!(p312().len() + c.len(), 16);
    }

    #[test]
    fn level_profiles() {
        assert_eq!(p312().level_profile().y, vec![1, 3, 0, 0, 0]);
        assert!(SetFamily::full(5).level_profile().y.iter().all(|&y| y == 0));
        assert_eq!(SetFamily::empty(3).level_profile().y, vec![1, 3, 3, 1]);
        assert_eq!(p312().level_profile().missing(), 4);
    }

    #[test]
    fn closure_examples() {
        assert_eq!(fam(2, &[&[1]]).upward_closure(), fam(2, &[&[1], &[1, 2]]));
        assert_eq!(
            fam(3, &[&[2, 3]]).upward_closure(),
            fam(3, &[&[2, 3], &[1, 2, 3]])
        );
        let closed = p312();
        assert!(closed.is_upward_closed());
        assert_eq!(closed.upward_closure(), closed);
    }

    #[test]
    fn shift_examples() {
        let f = fam(2, &[&[2], &[1, 2]]);
        assert_eq!(f.shift(1, 2).unwrap(), fam(2, &[&[1], &[1, 2]]));
        let g = fam(3, &[&[2, 3], &[1, 3]]);
        assert_eq!(g.shift(1, 2).unwrap(), g);
        let p = p312();
        for i in 1..=4 {
            for j in i + 1..=4 {
                assert_eq!(p.shift(i, j).unwrap(), p);
            }
        }
        assert!(p.is_shifted());
    }

    #[test]
    fn shift_rejects_bad_pairs() {
        let f = SetFamily::full(3);
        assert!(f.shift(2, 2).is_err());
        assert!(f.shift(3, 1).is_err());
        assert!(f.shift(1, 4).is_err());
        assert!(f.shift(0, 2).is_err());
    }

    #[test]
    fn full_shift_examples() {
        let r = fam(2, &[&[2]]).full_shift();
        assert_eq!(r.family, fam(2, &[&[1]]));
        assert!(!r.input_was_shifted);

        let r = fam(4, &[&[1, 2], &[3, 4]]).full_shift();
        assert_eq!(r.family, fam(4, &[&[1, 2], &[1, 3]]));
        assert!(r.family.is_shifted());

        let r = p312().full_shift();
        assert!(r.input_was_shifted);
        assert_eq!(r.changing_shifts, 0);
        assert_eq!(r.family, p312());
    }

    #[test]
    fn shadow_examples() {
        assert_eq!(fam(2, &[&[1, 2]]).shadow(), fam(2, &[&[1], &[2]]));
        assert_eq!(
            fam(3, &[&[1, 2], &[1, 3]]).shadow(),
            fam(3, &[&[1], &[2], &[3]])
        );
        assert!(fam(3, &[&[]]).shadow().is_empty());
    }

    #[test]
    fn link_examples() {
        let g = fam(5, &[&[1, 3, 4], &[2, 3], &[3, 5]]);
        let q1 = SubsetMask::from_elements(5, [1]).unwrap();
        assert_eq!(g.link(q1, 2).unwrap(), fam(5, &[&[3, 4]]));
        assert_eq!(g.link(SubsetMask::EMPTY, 2).unwrap(), fam(5, &[&[3, 5]]));
        let q3 = SubsetMask::from_elements(5, [3]).unwrap();
        assert!(matches!(g.link(q3, 2), Err(Error::LinkPrefix { .. })));
    }

    #[test]
    fn split_examples() {
        let f = fam(2, &[&[1], &[1, 2]]);
        let (with, without) = f.split_on(2).unwrap();
        assert_eq!(with, fam(1, &[&[1]]));
        assert_eq!(without, fam(1, &[&[1]]));

        let (with, without) = SetFamily::full(4).split_on(4).unwrap();
        assert_eq!(with, SetFamily::full(3));
        assert_eq!(without, SetFamily::full(3));
    }

    #[test]
    fn split_relabels_interior_element() {
        let f = fam(3, &[&[1, 2], &[2, 3], &[3]]);
        let (with, without) = f.split_on(2).unwrap();
        assert_eq!(with, fam(2, &[&[1], &[2]]));
        assert_eq!(without, fam(2, &[&[2]]));
    }

    #[test]
    fn minimal_members() {
        let mins = p312().minimal_nonempty_members();
        let mut expected: Vec<u32> = vec![0b0001, 0b0110, 0b1010, 0b1100];
        expected.sort();
        let mut got = mins.clone();
        got.sort();
        assert_eq!(got, expected);

        // non-monotone family: {1,2,3} has the subset {1} two levels down
        let f = fam(3, &[&[], &[1], &[1, 2, 3], &[2, 3]]);
        let mut got = f.minimal_nonempty_members();
        got.sort();
        assert_eq!(got, vec![0b001, 0b110]);
    }
}
