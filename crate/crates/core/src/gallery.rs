//! The named constructions: `P(s,m,l)`, `B(n,q,s)`, `A_i^(k)(n,s)`,
//! `H^(k)(n,s)`, `W(m,s)`, threshold families `F(α)` and stars.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, BigUint, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{params, Error, Result};
use crate::family::{check_ground, SetFamily, SubsetMask};
use crate::formulas::{binom, int_rat, rat};
use crate::invariants::{covering_number, has_d_property, matching_number};
use crate::params::KeyValues;
use crate::report::{Check, Report};

/// Number of subsets `A ⊆ [n]` with `|A| + |A ∩ [L]| ≥ t`, `L = min(lead, n)`.
pub fn two_tier_count(n: i64, lead: i64, t: i64) -> BigUint {
    let lead = lead.clamp(0, n);
    let mut total = BigUint::zero();
    for a in 0..=lead {
        let inner: BigUint = ((t - 2 * a).max(0)..=n - lead)
            .map(|b| binom(n - lead, b))
            .sum();
        total += binom(lead, a) * inner;
    }
    total
}

/// `|P(s,m,l)|` on `n = sm+s−l`.
pub fn p_size(s: i64, m: i64, l: i64) -> BigUint {
    two_tier_count(s * m + s - l, l - 1, m + 1)
}

/// Writes `q = s(m+1) − l` with `1 <= l <= s`; returns `(m+1, l)`.
pub fn decode_q(q: i64, s: i64) -> (i64, i64) {
    let t = Integer::div_ceil(&(q + 1), &s);
    (t, s * t - q)
}

/// `|B(n,q,s)|`.
pub fn b_size(n: i64, q: i64, s: i64) -> BigUint {
    let (t, l) = decode_q(q, s);
    two_tier_count(n, l - 1, t)
}

/// Nonincreasing nonnegative weights; `F(α) = {F : Σ_{i∈F} α_i ≥ 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdVector {
    pub alpha: Vec<BigRational>,
}

impl ThresholdVector {
    pub fn new(alpha: Vec<BigRational>) -> Result<Self> {
        if alpha.iter().any(|a| a.is_negative()) {
            return params("threshold weights must be nonnegative");
        }
        if alpha.windows(2).any(|w| w[0] < w[1]) {
            return params("threshold weights must be nonincreasing");
        }
        Ok(ThresholdVector { alpha })
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn sum(&self) -> BigRational {
        self.alpha
            .iter()
            .cloned()
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// The least integer `s` with `Σα < s`.
    pub fn matching_budget(&self) -> usize {
        (self.sum().floor().to_integer() + BigInt::one())
            .to_usize()
            .expect("small budget")
    }

    /// Integer weights `w` and threshold `T` with `Σ_{i∈F} w_i ≥ T ⇔ F ∈ F(α)`.
    pub fn integer_weights(&self) -> Result<(Vec<u64>, u64)> {
        let den = self
            .alpha
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let scale = |r: &BigRational| (r * int_rat(den.clone())).to_integer().to_u64();
        let weights: Option<Vec<u64>> = self.alpha.iter().map(scale).collect();
        match (weights, den.to_u64()) {
            (Some(w), Some(t)) if w.iter().try_fold(0u64, |a, &b| a.checked_add(b)).is_some() => {
                Ok((w, t))
            }
            _ => Err(Error::Cap("threshold weights do not fit in 64 bits".into())),
        }
    }
}

impl fmt::Display for ThresholdVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.alpha.iter().map(|a| a.to_string()).collect();
        write!(f, "thresh:{}", parts.join(","))
    }
}

/// Sets whose integer weight reaches the threshold.
pub fn weight_family(n: usize, weights: &[u64], threshold: u64) -> SetFamily {
    assert_eq!(weights.len(), n);
    SetFamily::from_fn(n, |m| {
        m.elements().map(|x| weights[x - 1]).sum::<u64>() >= threshold
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaPreset {
    /// `α_p` for `P(s,m,l)`.
    P { s: usize, m: usize, l: usize },
    /// `α_w` for `W(m,s)` on `[n]`.
    W { m: usize, s: usize, n: usize },
    /// `α_h` with `F(α_h) ∩ ([n] choose k) = H^(k)(n,t)`.
    H { k: usize, n: usize, t: usize },
}

pub fn preset_alpha(preset: AlphaPreset) -> Result<ThresholdVector> {
    let alpha = match preset {
        AlphaPreset::P { s, m, l } => {
            check_p(s, m, l)?;
            let n = s * m + s - l;
            let d = (m + 1) as i64;
            (0..n)
                .map(|i| if i < l - 1 { rat(2, d) } else { rat(1, d) })
                .collect()
        }
        AlphaPreset::W { m, s, n } => {
            check_w(m, s, n)?;
            (0..n)
                .map(|i| {
                    if i < s * m - 1 {
                        rat(1, m as i64)
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        }
        AlphaPreset::H { k, n, t } => {
            if k < 1 || t < 1 || n < t + k {
                return params(format!(
                    "alpha_h needs k >= 1, t >= 1 and n >= t+k; got k={k}, n={n}, t={t}"
                ));
            }
            let k = k as i64;
            let mut alpha = vec![BigRational::one(); t - 1];
            alpha.push(rat(k - 1, k));
            alpha.extend((0..k).map(|_| rat(1, k)));
            alpha.resize(n, BigRational::zero());
            alpha
        }
    };
    ThresholdVector::new(alpha)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructionSpec {
    /// `{P : |P| + |P ∩ [l−1]| ≥ m+1}` on `n = sm+s−l`.
    P {
        s: usize,
        m: usize,
        l: usize,
    },
    /// `{F : |F| + |F ∩ [l−1]| ≥ m+1}` on `[n]`, where `q = s(m+1) − l`.
    B {
        n: usize,
        q: i64,
        s: usize,
    },
    /// `{A ∈ ([n] choose k) : |A ∩ [(s+1)i−1]| ≥ i}`.
    A {
        i: usize,
        k: usize,
        n: usize,
        s: usize,
    },
    /// `k`-sets meeting `[s]`, plus `[s+1,s+k]`, minus the `k`-sets meeting
    /// `[s]` only in `s` and missing `[s+1,s+k]`.
    H {
        k: usize,
        n: usize,
        s: usize,
    },
    /// `{W : |W ∩ [sm−1]| ≥ m}` on `[n]`.
    W {
        m: usize,
        s: usize,
        n: usize,
    },
    Threshold(ThresholdVector),
    /// Sets containing `center`, of size `k` or of any size.
    Star {
        n: usize,
        center: SubsetMask,
        k: Option<usize>,
    },
}

fn check_p(s: usize, m: usize, l: usize) -> Result<()> {
    if s < 2 || m < 1 || l < 1 || l > s {
        return params(format!(
            "P needs s >= 2, m >= 1 and 0 < l <= s; got s={s}, m={m}, l={l}"
        ));
    }
    Ok(())
}

fn check_w(m: usize, s: usize, n: usize) -> Result<()> {
    if s < 2 || m < 1 {
        return params(format!("W needs s >= 2 and m >= 1; got m={m}, s={s}"));
    }
    if n + 1 < s * m {
        return params(format!("W needs n >= sm-1 = {}; got n={n}", s * m - 1));
    }
    Ok(())
}

impl ConstructionSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ConstructionSpec::P { s, m, l } => check_p(s, m, l),
            ConstructionSpec::B { s, .. } => {
                if s < 2 {
                    return params(format!("B needs s >= 2; got s={s}"));
                }
                Ok(())
            }
            ConstructionSpec::A { i, k, n, s } => {
                if s < 1 || i < 1 || i > k {
                    return params(format!(
                        "A needs s >= 1 and 1 <= i <= k; got i={i}, k={k}, s={s}"
                    ));
                }
                if n < (s + 1) * k {
                    return params(format!("A needs n >= (s+1)k = {}; got n={n}", (s + 1) * k));
                }
                Ok(())
            }
            ConstructionSpec::H { k, n, s } => {
                if k < 1 || s < 1 {
                    return params(format!("H needs k >= 1 and s >= 1; got k={k}, s={s}"));
                }
                if n < s * k || n < s + k {
                    return params(format!(
                        "H needs n >= sk = {} and n >= s+k = {}; got n={n}",
                        s * k,
                        s + k
                    ));
                }
                Ok(())
            }
            ConstructionSpec::W { m, s, n } => check_w(m, s, n),
            ConstructionSpec::Threshold(_) => Ok(()),
            ConstructionSpec::Star { n, center, k } => {
                if !center.fits(n) {
                    return params(format!("star center {center} is not inside [1,{n}]"));
                }
                if let Some(k) = k {
                    if k < center.len() || k > n {
                        return params(format!(
                            "star size k={k} must lie in [{}, {n}]",
                            center.len()
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Ground set size.
    pub fn n(&self) -> usize {
        match *self {
            ConstructionSpec::P { s, m, l } => s * m + s - l,
            ConstructionSpec::B { n, .. }
            | ConstructionSpec::A { n, .. }
            | ConstructionSpec::H { n, .. }
            | ConstructionSpec::W { n, .. }
            | ConstructionSpec::Star { n, .. } => n,
            ConstructionSpec::Threshold(ref t) => t.n(),
        }
    }

    /// Membership test for one subset.
    fn member_fn(&self) -> Result<Box<dyn Fn(SubsetMask) -> bool + Sync>> {
        let pre = |k: usize| SubsetMask::prefix(k);
        Ok(match *self {
            ConstructionSpec::P { m, l, .. } => {
                let lead = pre(l - 1);
                Box::new(move |a: SubsetMask| a.len() + a.intersection(lead).len() > m)
                    as Box<dyn Fn(SubsetMask) -> bool + Sync>
            }
            ConstructionSpec::B { n, q, s } => {
                let (t, l) = decode_q(q, s as i64);
                let lead = pre(((l - 1) as usize).min(n));
                Box::new(move |a| (a.len() + a.intersection(lead).len()) as i64 >= t)
            }
            ConstructionSpec::A { i, k, s, .. } => {
                let head = pre((s + 1) * i - 1);
                Box::new(move |a| a.len() == k && a.intersection(head).len() >= i)
            }
            ConstructionSpec::H { k, s, .. } => {
                let head = pre(s);
                let block = SubsetMask::interval(s + 1, s + k);
                let last = SubsetMask::prefix(s).difference(pre(s - 1));
                Box::new(move |a| {
                    if a.len() != k {
                        return false;
                    }
                    if a == block {
                        return true;
                    }
                    let meet = a.intersection(head);
                    !meet.is_empty() && !(meet == last && a.is_disjoint(block))
                })
            }
            ConstructionSpec::W { m, s, .. } => {
                let head = pre(s * m - 1);
                Box::new(move |a| a.intersection(head).len() >= m)
            }
            ConstructionSpec::Threshold(ref t) => {
                let (w, thr) = t.integer_weights()?;
                Box::new(move |a| a.elements().map(|x| w[x - 1]).sum::<u64>() >= thr)
            }
            ConstructionSpec::Star { center, k, .. } => {
                Box::new(move |a| center.is_subset_of(a) && k.is_none_or(|k| a.len() == k))
            }
        })
    }

    /// Whether the construction is invariant under every left shift.
    pub fn expect_shifted(&self) -> bool {
        match *self {
            ConstructionSpec::Star { center, .. } => center == SubsetMask::prefix(center.len()),
            // H^(1) is {1},...,{s-1},{s+1}
            ConstructionSpec::H { k, .. } => k >= 2,
            _ => true,
        }
    }
}

impl fmt::Display for ConstructionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionSpec::P { s, m, l } => write!(f, "P:s={s},m={m},l={l}"),
            ConstructionSpec::B { n, q, s } => write!(f, "B:n={n},q={q},s={s}"),
            ConstructionSpec::A { i, k, n, s } => write!(f, "A:i={i},k={k},n={n},s={s}"),
            ConstructionSpec::H { k, n, s } => write!(f, "H:k={k},n={n},s={s}"),
            ConstructionSpec::W { m, s, n } => write!(f, "W:m={m},s={s},n={n}"),
            ConstructionSpec::Threshold(t) => write!(f, "{t}"),
            ConstructionSpec::Star { n, center, k } => {
                let c: Vec<String> = center.elements().map(|x| x.to_string()).collect();
                write!(f, "star:n={n},center={}", c.join("+"))?;
                if let Some(k) = k {
                    write!(f, ",k={k}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_rational(tok: &str) -> Result<BigRational> {
    let bad = || Error::Params(format!("bad rational `{tok}`"));
    let (p, q) = match tok.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (tok.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

impl FromStr for ConstructionSpec {
    type Err = Error;

    /// Parses `P:s=3,m=1,l=2`, `B:n=5,q=3,s=2`, `A:i=2,k=3,n=12,s=2`,
    /// `H:k=2,n=6,s=2`, `W:m=2,s=3,n=7`, `thresh:1,1/2,1/2,1/2` or
    /// `star:n=5,center=1+2,k=2`.
    fn from_str(text: &str) -> Result<Self> {
        let (kind, rest) = text.split_once(':').ok_or_else(|| {
            Error::Params(format!("construction `{text}` needs a `kind:` prefix"))
        })?;
        let spec = match kind.trim() {
            "thresh" | "threshold" => {
                let alpha = rest
                    .split(',')
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?;
                ConstructionSpec::Threshold(ThresholdVector::new(alpha)?)
            }
            kind => {
                let kv = KeyValues::parse([rest])?;
                match kind {
                    "P" | "p" => {
                        kv.only(&["s", "m", "l"])?;
                        ConstructionSpec::P {
                            s: kv.usize("s")?,
                            m: kv.usize("m")?,
                            l: kv.usize("l")?,
                        }
                    }
                    "B" | "b" => {
                        kv.only(&["n", "q", "s"])?;
                        ConstructionSpec::B {
                            n: kv.usize("n")?,
                            q: kv.int("q")?,
                            s: kv.usize("s")?,
                        }
                    }
                    "A" | "a" => {
                        kv.only(&["i", "k", "n", "s"])?;
                        ConstructionSpec::A {
                            i: kv.usize("i")?,
                            k: kv.usize("k")?,
                            n: kv.usize("n")?,
                            s: kv.usize("s")?,
                        }
                    }
                    "H" | "h" => {
                        kv.only(&["k", "n", "s"])?;
                        ConstructionSpec::H {
                            k: kv.usize("k")?,
                            n: kv.usize("n")?,
                            s: kv.usize("s")?,
                        }
                    }
                    "W" | "w" => {
                        kv.only(&["m", "s", "n"])?;
                        ConstructionSpec::W {
                            m: kv.usize("m")?,
                            s: kv.usize("s")?,
                            n: kv.usize("n")?,
                        }
                    }
                    "star" => {
                        kv.only(&["n", "center", "k"])?;
                        let n = kv.usize("n")?;
                        let raw = kv.raw("center").unwrap_or("");
                        let elements = raw
                            .split('+')
                            .filter(|t| !t.trim().is_empty())
                            .map(|t| {
                                t.trim()
                                    .parse::<usize>()
                                    .map_err(|_| Error::Params(format!("bad center `{raw}`")))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        let center = SubsetMask::from_elements(n, elements)?;
                        let k = match kv.raw("k") {
                            None | Some("all") => None,
                            Some(_) => Some(kv.usize("k")?),
                        };
                        ConstructionSpec::Star { n, center, k }
                    }
                    other => return params(format!("unknown construction kind `{other}`")),
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Materializes the construction.
pub fn build(spec: &ConstructionSpec) -> Result<SetFamily> {
    spec.validate()?;
    let n = spec.n();
    check_ground(n)?;
    let member = spec.member_fn()?;
    Ok(SetFamily::from_fn(n, member))
}

/// Exact cardinality, without materializing where a closed count exists.
pub fn size_of(spec: &ConstructionSpec) -> Result<BigUint> {
    spec.validate()?;
    let i = |v: usize| v as i64;
    Ok(match *spec {
        ConstructionSpec::P { s, m, l } => p_size(i(s), i(m), i(l)),
        ConstructionSpec::B { n, q, s } => b_size(i(n), q, i(s)),
        ConstructionSpec::A { i: idx, k, n, s } => {
            let head = i((s + 1) * idx - 1);
            (i(idx)..=i(k))
                .map(|j| binom(head, j) * binom(i(n) - head, i(k) - j))
                .sum()
        }
        ConstructionSpec::H { k, n, s } => {
            let (k, n, s) = (i(k), i(n), i(s));
            binom(n, k) - binom(n - s, k) + BigUint::one() - binom(n - s - k, k - 1)
        }
        ConstructionSpec::W { m, s, n } => {
            let head = i(s * m - 1);
            let inner: BigUint = (i(m)..=head).map(|a| binom(head, a)).sum();
            inner << (n + 1 - s * m)
        }
        ConstructionSpec::Threshold(_) => BigUint::from(build(spec)?.len()),
        ConstructionSpec::Star { n, center, k } => {
            let free = n - center.len();
            match k {
                Some(k) => binom(i(free), i(k - center.len())),
                None => BigUint::one() << free,
            }
        }
    })
}

/// Builds the construction and checks its advertised size, matching number,
/// covering number, constraint property and shiftedness.
pub fn verify_construction(spec: &ConstructionSpec) -> Result<Report> {
    spec.validate()?;
    let mut rep = Report::new(spec.to_string());
    let expected = size_of(spec)?;
    if spec.n() > crate::family::MAX_N {
        rep.push(Check::skipped(
            "materialized checks",
            format!("n={} exceeds 24", spec.n()),
        ));
        return Ok(rep);
    }
    let fam = build(spec)?;
    rep.push(Check::holds(
        "size agrees with count",
        BigUint::from(fam.len()) == expected,
        format!("built {} vs counted {expected}", fam.len()),
    ));
    let nu = || matching_number(&fam).nu;
    match *spec {
        ConstructionSpec::P { s, .. } => {
            let nu = nu();
            rep.push(Check::holds("nu < s", nu < s, format!("nu={nu}, s={s}")));
        }
        ConstructionSpec::B { n, q, s } => {
            if q > n as i64 {
                rep.push(Check::skipped("D(s,q)", format!("q={q} exceeds n={n}")));
            } else {
                let d = has_d_property(&fam, s, q.max(0) as usize);
                let detail = match &d.violating {
                    Some(v) => format!("violated by {v:?}"),
                    None => format!("no {s} disjoint members with union <= {q}"),
                };
                rep.push(Check::holds("D(s,q)", d.holds, detail));
            }
        }
        ConstructionSpec::A { i, k, n, s } => {
            let nu = nu();
            rep.push(Check::holds("nu = s", nu == s, format!("nu={nu}, s={s}")));
            let tau = covering_number(&fam)?.tau;
            if i == 1 {
                rep.push(Check::holds("tau = s", tau == s, format!("tau={tau}")));
            } else if n >= k + s {
                rep.push(Check::holds("tau > s", tau > s, format!("tau={tau}")));
            }
        }
        ConstructionSpec::H { k, s, .. } => {
            let nu = nu();
            rep.push(Check::holds("nu = s", nu == s, format!("nu={nu}, s={s}")));
            if k >= 2 {
                let tau = covering_number(&fam)?.tau;
                rep.push(Check::holds(
                    "tau = s+1",
                    tau == s + 1,
                    format!("tau={tau}"),
                ));
            } else {
                rep.push(Check::skipped("tau = s+1", "needs k >= 2"));
            }
        }
        ConstructionSpec::W { s, .. } => {
            let nu = nu();
            rep.push(Check::holds(
                "nu = s-1",
                nu + 1 == s,
                format!("nu={nu}, s={s}"),
            ));
        }
        ConstructionSpec::Threshold(ref t) => {
            let s = t.matching_budget();
            let nu = nu();
            rep.push(Check::holds(
                "nu < s for sum(alpha) < s",
                nu < s,
                format!("nu={nu}, s={s}, sum={}", t.sum()),
            ));
        }
        ConstructionSpec::Star { center, .. } => {
            if !center.is_empty() && !fam.is_empty() {
                let nu = nu();
                rep.push(Check::holds("nu = 1", nu == 1, format!("nu={nu}")));
            }
        }
    }
    if spec.expect_shifted() {
        rep.push(Check::holds("shifted", fam.is_shifted(), ""));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> ConstructionSpec {
        text.parse().unwrap()
    }

    #[test]
    fn p312_members() {
        let p = build(&spec("P:s=3,m=1,l=2")).unwrap();
        assert_eq!(p.n(), 4);
        assert_eq!(p.len(), 12);
        let expected = SetFamily::from_fn(4, |m| m.len() >= 2 || m == SubsetMask(1));
        assert_eq!(p, expected);
    }

    #[test]
    fn hm_small() {
        let h = build(&spec("H:k=2,n=5,s=1")).unwrap();
        let expected =
            SetFamily::from_masks(5, [SubsetMask(0b011), SubsetMask(0b101), SubsetMask(0b110)]);
        assert_eq!(h, expected);
        assert_eq!(
            size_of(&spec("H:k=2,n=5,s=1")).unwrap(),
            BigUint::from(3u32)
        );
    }

    #[test]
    fn sizes() {
        assert_eq!(
            size_of(&spec("W:m=2,s=3,n=7")).unwrap(),
            BigUint::from(104u32)
        );
        assert_eq!(
            size_of(&spec("P:s=5,m=1,l=2")).unwrap(),
            BigUint::from(248u32)
        );
        assert_eq!(
            size_of(&spec("P:s=4,m=2,l=2")).unwrap(),
            BigUint::from(977u32)
        );
        assert_eq!(
            size_of(&spec("P:s=3,m=2,l=3")).unwrap(),
            BigUint::from(51u32)
        );
        assert_eq!(
            size_of(&spec("B:n=5,q=3,s=2")).unwrap(),
            BigUint::from(26u32)
        );
        assert_eq!(
            size_of(&spec("B:n=5,q=4,s=3")).unwrap(),
            BigUint::from(27u32)
        );
        assert_eq!(
            size_of(&spec("star:n=5,center=1+2")).unwrap(),
            BigUint::from(8u32)
        );
        assert_eq!(
            size_of(&spec("star:n=5,center=1,k=2")).unwrap(),
            BigUint::from(4u32)
        );
    }

    #[test]
    fn threshold_equals_p312() {
        let t = build(&spec("thresh:1,1/2,1/2,1/2")).unwrap();
        assert_eq!(t, build(&spec("P:s=3,m=1,l=2")).unwrap());
    }

    #[test]
    fn presets() {
        let ap = preset_alpha(AlphaPreset::P { s: 3, m: 1, l: 2 }).unwrap();
        assert_eq!(ap.to_string(), "thresh:1,1/2,1/2,1/2");
        let aw = preset_alpha(AlphaPreset::W { m: 2, s: 3, n: 7 }).unwrap();
        assert_eq!(aw.to_string(), "thresh:1/2,1/2,1/2,1/2,1/2,0,0");
        let ah = preset_alpha(AlphaPreset::H { k: 2, n: 6, t: 1 }).unwrap();
        assert_eq!(ah.to_string(), "thresh:1/2,1/2,1/2,0,0,0");
        assert_eq!(ap.matching_budget(), 3);
        assert_eq!(aw.matching_budget(), 3);
    }

    #[test]
    fn alpha_h_recovers_h() {
        for k in 2..=3 {
            for t in 1..=3 {
                let n = (t * k).max(t + k) + 1;
                let alpha = preset_alpha(AlphaPreset::H { k, n, t }).unwrap();
                let thr = build(&ConstructionSpec::Threshold(alpha)).unwrap().level(k);
                let h = build(&ConstructionSpec::H { k, n, s: t }).unwrap();
                assert_eq!(thr, h, "k={k} t={t}");
            }
        }
    }

    #[test]
    fn p_equals_b() {
        for s in 2..=5 {
            for m in 1..=3 {
                for l in 1..=s {
                    let n = s * m + s - l;
                    if n > 14 {
                        continue;
                    }
                    let q = (s * (m + 1) - l) as i64;
                    let p = build(&ConstructionSpec::P { s, m, l }).unwrap();
                    let b = build(&ConstructionSpec::B { n, q, s }).unwrap();
                    assert_eq!(p, b, "s={s} m={m} l={l}");
                }
            }
        }
    }

    #[test]
    fn b_split_halves() {
        let b = build(&spec("B:n=5,q=3,s=2")).unwrap();
        let (with, without) = b.split_on(5).unwrap();
        assert_eq!(without, build(&spec("B:n=4,q=3,s=2")).unwrap());
        assert_eq!(with, build(&spec("B:n=4,q=1,s=2")).unwrap());
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_q(3, 2), (2, 1));
        assert_eq!(decode_q(4, 3), (2, 2));
        assert_eq!(decode_q(0, 3), (1, 3));
        assert_eq!(decode_q(-1, 3), (0, 1));
        assert_eq!(decode_q(-2, 3), (0, 2));
    }

    #[test]
    fn w_beats_p_at_twenty() {
        let w = size_of(&ConstructionSpec::W {
            m: 20,
            s: 20,
            n: 401,
        })
        .unwrap();
        let p = size_of(&ConstructionSpec::P {
            s: 20,
            m: 20,
            l: 19,
        })
        .unwrap();
        assert!(w > p);
    }

    #[test]
    fn verify_reports() {
        for text in [
            "P:s=3,m=1,l=2",
            "H:k=2,n=6,s=2",
            "W:m=2,s=5,n=11",
            "A:i=2,k=2,n=9,s=2",
            "B:n=5,q=3,s=2",
        ] {
            let rep = verify_construction(&spec(text)).unwrap();
            assert!(rep.passed(), "{text}: {rep:?}");
        }
    }

    #[test]
    fn rejects_bad_specs() {
        for text in [
            "P:s=3,m=1,l=4",
            "H:k=3,n=5,s=2",
            "A:i=3,k=2,n=20,s=2",
            "W:m=3,s=3,n=5",
            "thresh:1/2,1",
            "Q:s=1",
            "P:s=3",
        ] {
            assert!(text.parse::<ConstructionSpec>().is_err(), "{text}");
        }
    }

    #[test]
    fn link_of_a1_is_empty() {
        for (k, s) in [(2, 2), (3, 2), (2, 3)] {
            let n = (s + 1) * k;
            let a = build(&ConstructionSpec::A { i: 1, k, n, s }).unwrap();
            assert!(a.link(SubsetMask::EMPTY, s).unwrap().is_empty());
            assert!(a.link(SubsetMask::EMPTY, s + 1).unwrap().is_empty());
        }
    }
}
