//! Family generators: seeded random monotone families, random permutations,
//! and exhaustive enumeration of up-sets on small ground sets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::family::{SetFamily, SubsetMask};
use crate::invariants::matching_number;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random permutation of `0..n`.
pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// A random subset of `[n]` with exactly `k` elements.
pub fn random_k_set<R: Rng>(rng: &mut R, n: usize, k: usize) -> SubsetMask {
    let p = random_permutation(rng, n);
    SubsetMask(p[..k].iter().fold(0, |a, &x| a | 1 << x))
}

/// A random up-set on `[n]` with `ν < s`.
///
/// Draws a handful of random generators, closes upward, then deletes minimal
/// members from a maximum matching until the matching number drops below `s`.
/// A few more minimal members are dropped at random so that the result is not
/// always maximal.
pub fn random_monotone<R: Rng>(rng: &mut R, n: usize, s: usize) -> SetFamily {
    assert!(s >= 1);
    let count = rng.gen_range(1..=2 * n.max(1));
    let mut gens = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.gen_range(1..=n.div_ceil(2).max(1)).min(n);
        gens.push(random_k_set(rng, n, k));
    }
    let mut f = SetFamily::from_masks(n, gens).upward_closure();
    loop {
        let m = matching_number(&f);
        if m.nu < s {
            break;
        }
        let victim = m.sets[rng.gen_range(0..m.sets.len())];
        f = without(&f, victim);
    }
    let extra = rng.gen_range(0..=2);
    for _ in 0..extra {
        let mins = f.minimal_nonempty_members();
        if mins.is_empty() {
            break;
        }
        let victim = SubsetMask(mins[rng.gen_range(0..mins.len())]);
        f = without(&f, victim);
    }
    f
}

/// `F ∖ {A}`; keeps an up-set an up-set when `A` is minimal.
pub fn without(f: &SetFamily, a: SubsetMask) -> SetFamily {
    SetFamily::from_fn(f.n(), |b| b != a && f.contains(b))
}

/// A uniformly random family (every subset independently with probability 1/2).
pub fn random_family<R: Rng>(rng: &mut R, n: usize) -> SetFamily {
    SetFamily::from_fn(n, |_| rng.gen())
}

/// Truth tables of every up-set of `2^[n]`, `n <= 5`, bit `A` set iff `A` is a member.
///
/// An up-set on `[n]` is a pair `(A, B)` of up-sets on `[n−1]` with `A ⊆ B`:
/// `A` holds the members avoiding `n`, `B` the traces of those containing it.
pub fn upset_tables(n: usize) -> Vec<u64> {
    assert!(n <= 5, "tables are kept only up to n = 5");
    let mut tables = vec![0u64, 1];
    for k in 1..=n {
        let half = 1u32 << (k - 1);
        let mut next = Vec::new();
        for &b in &tables {
            for &a in &tables {
                if a & !b == 0 {
                    next.push(a | b << half);
                }
            }
        }
        next.sort_unstable();
        tables = next;
    }
    tables
}

/// Calls `visit` with the truth table of every up-set on `[n]`, `n <= 6`.
pub fn for_each_upset(n: usize, mut visit: impl FnMut(u64)) {
    assert!(n <= 6, "up-set enumeration is capped at n = 6");
    if n <= 5 {
        upset_tables(n).into_iter().for_each(visit);
        return;
    }
    let lower = upset_tables(5);
    for &b in &lower {
        for &a in &lower {
            if a & !b == 0 {
                visit(a | b << 32);
            }
        }
    }
}

pub fn family_from_table(n: usize, table: u64) -> SetFamily {
    SetFamily::from_fn(n, |m| table >> m.0 & 1 == 1)
}

/// Every up-set on `[n]`, `n <= 5`, as a family.
pub fn all_upsets(n: usize) -> Vec<SetFamily> {
    upset_tables(n)
        .into_iter()
        .map(|t| family_from_table(n, t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedekind_counts() {
        let counts: Vec<usize> = (0..=5).map(|n| upset_tables(n).len()).collect();
        assert_eq!(counts, vec![2, 3, 6, 20, 168, 7581]);
    }

    #[test]
    fn tables_are_upsets() {
        for f in all_upsets(4) {
            assert!(f.is_upward_closed());
        }
    }

    #[test]
    fn random_monotone_respects_bound() {
        let mut rng = seeded(3);
        for i in 0..200 {
            let n = 3 + i % 6;
            let s = 2 + i % 4;
            let f = random_monotone(&mut rng, n, s);
            assert!(f.is_upward_closed());
            assert!(matching_number(&f).nu < s);
        }
    }

    #[test]
    fn seeds_reproduce() {
        let a = random_monotone(&mut seeded(9), 7, 3);
        let b = random_monotone(&mut seeded(9), 7, 3);
        assert_eq!(a, b);
        assert_eq!(
            random_permutation(&mut seeded(1), 8),
            random_permutation(&mut seeded(1), 8)
        );
    }

    #[test]
    fn permutation_is_bijection() {
        let mut p = random_permutation(&mut seeded(5), 10);
        p.sort();
        assert_eq!(p, (0..10).collect::<Vec<_>>());
    }
}
