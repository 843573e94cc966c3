//! Sphere-orbifold signatures, Euler characteristics, covering degrees of the
//! Klein coverings, and the pullback-signature computation.
//!
//! An orbifold on the sphere is recorded by its signature: the multiset of
//! ramification values `ν > 1`. All Euler characteristics are exact
//! rationals.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::datum::BranchDatum;

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrbifoldError {
    #[error("signature value must be at least 2, got {0}")]
    SmallValue(u64),
    #[error("bad orbifold (one singular point, or two with distinct values)")]
    Bad,
    #[error("Euler characteristic is not positive")]
    NonPositiveChi,
    #[error("assignment index {0} out of range")]
    BadIndex(usize),
}

/// Classification of a sphere orbifold by its signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignatureKind {
    /// Empty signature.
    NonRamified,
    /// One singular point, or two with distinct values: no universal cover.
    Bad,
    Good,
}

/// The signature `ν(𝒪)` of an orbifold on the sphere: the multiset of
/// ramification values `≥ 2`, stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbifoldSignature {
    values: Vec<u64>,
}

impl OrbifoldSignature {
    pub fn new(mut values: Vec<u64>) -> Result<Self, OrbifoldError> {
        if let Some(&v) = values.iter().find(|&&v| v < 2) {
            return Err(OrbifoldError::SmallValue(v));
        }
        values.sort_unstable();
        Ok(OrbifoldSignature { values })
    }

    pub fn empty() -> Self {
        OrbifoldSignature { values: vec![] }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn kind(&self) -> SignatureKind {
        match self.values.as_slice() {
            [] => SignatureKind::NonRamified,
            [_] => SignatureKind::Bad,
            [a, b] if a != b => SignatureKind::Bad,
            _ => SignatureKind::Good,
        }
    }

    pub fn is_good(&self) -> bool {
        self.kind() != SignatureKind::Bad
    }

    /// Euler characteristic `χ = 2 + Σ (1/v − 1)`.
    pub fn chi(&self) -> Rational {
        let mut chi = Rational::from_integer(2);
        for &v in &self.values {
            chi += Rational::new(1, v as i64) - 1;
        }
        chi
    }

    /// Degree of the universal covering `θ_𝒪` for a good signature of
    /// positive Euler characteristic: `1, d, 2d, 12, 24, 60` for the
    /// signatures `∅, {d,d}, {2,2,d}, {2,3,3}, {2,3,4}, {2,3,5}`.
    pub fn theta_degree(&self) -> Result<u64, OrbifoldError> {
        match self.values.as_slice() {
            [] => Ok(1),
            [d, e] if d == e => Ok(*d),
            [2, 2, d] => Ok(2 * d),
            [2, 3, 3] => Ok(12),
            [2, 3, 4] => Ok(24),
            [2, 3, 5] => Ok(60),
            _ if !self.is_good() => Err(OrbifoldError::Bad),
            _ => Err(OrbifoldError::NonPositiveChi),
        }
    }
}

impl fmt::Display for OrbifoldSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Invariants of the triple orbifold `{a,b,c}`: `χ`, the covering degree
/// `n(a,b,c)` (defined when `χ > 0`), and `l(a,b,c) = lcm(a,b,c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleInvariants {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub chi: Rational,
    pub n_abc: Option<u64>,
    pub l_abc: u64,
}

pub fn triple_invariants(a: u64, b: u64, c: u64) -> TripleInvariants {
    assert!(a >= 2 && b >= 2 && c >= 2);
    let chi = Rational::new(1, a as i64) + Ratio::new(1, b as i64) + Ratio::new(1, c as i64) - 1;
    let n_abc = if chi > Rational::from_integer(0) {
        let deg = Rational::from_integer(2) / chi;
        debug_assert!(deg.is_integer());
        Some(deg.to_integer() as u64)
    } else {
        None
    };
    let l_abc = a.lcm(&b).lcm(&c);
    TripleInvariants {
        a,
        b,
        c,
        chi,
        n_abc,
        l_abc,
    }
}

/// Placement of orbifold ramification values on the partitions of a branch
/// datum: partition index → value `ν ≥ 2`, each index used at most once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbifoldAssignment {
    entries: BTreeMap<usize, u64>,
}

impl OrbifoldAssignment {
    pub fn new(entries: BTreeMap<usize, u64>) -> Result<Self, OrbifoldError> {
        if let Some((_, &v)) = entries.iter().find(|(_, &v)| v < 2) {
            return Err(OrbifoldError::SmallValue(v));
        }
        Ok(OrbifoldAssignment { entries })
    }

    pub fn from_pairs(pairs: &[(usize, u64)]) -> Result<Self, OrbifoldError> {
        Self::new(pairs.iter().copied().collect())
    }

    pub fn entries(&self) -> &BTreeMap<usize, u64> {
        &self.entries
    }

    /// The signature of the orbifold this assignment induces downstairs.
    pub fn induced_signature(&self) -> OrbifoldSignature {
        OrbifoldSignature::new(self.entries.values().copied().collect()).unwrap()
    }
}

impl fmt::Display for OrbifoldAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}→{}", k + 1, v)?;
        }
        write!(f, "}}")
    }
}

/// Classification of a pullback orbifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PullbackKind {
    NonRamified,
    Bad,
    GoodPositive,
    GoodNonPositive,
}

/// The pullback orbifold `f*(𝒪)` computed from a branch datum and an
/// assignment: signature, Euler characteristic and classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackResult {
    pub signature: OrbifoldSignature,
    pub chi: Rational,
    pub kind: PullbackKind,
}

/// Computes the pullback orbifold signature: for every assigned partition
/// index `i` with value `ν` and every entry `e` of `Πᵢ`, the point above
/// contributes `ν / gcd(e, ν)`, kept when `> 1`. Unassigned partitions and
/// generic points contribute nothing.
pub fn pullback(
    datum: &BranchDatum,
    asg: &OrbifoldAssignment,
) -> Result<PullbackResult, OrbifoldError> {
    if !asg.induced_signature().is_good() {
        return Err(OrbifoldError::Bad);
    }
    let mut values = Vec::new();
    for (&idx, &nu) in asg.entries() {
        let partition = datum
            .partitions()
            .get(idx)
            .ok_or(OrbifoldError::BadIndex(idx))?;
        for &e in partition.parts() {
            let v = nu / e.gcd(&nu);
            if v > 1 {
                values.push(v);
            }
        }
    }
    let signature = OrbifoldSignature::new(values).unwrap();
    let chi = signature.chi();
    let kind = match signature.kind() {
        SignatureKind::NonRamified => PullbackKind::NonRamified,
        SignatureKind::Bad => PullbackKind::Bad,
        SignatureKind::Good => {
            if chi > Rational::from_integer(0) {
                PullbackKind::GoodPositive
            } else {
                PullbackKind::GoodNonPositive
            }
        }
    };
    Ok(PullbackResult {
        signature,
        chi,
        kind,
    })
}

fn divisors(v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= v {
        if v % d == 0 {
            out.push(d);
            if d != v / d {
                out.push(v / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// Candidate ramification values for one partition: all divisors `≥ 2` of
/// `gcd(Π \ T)` over every sub-multiset `T` with `|T| ≤ max_singular` leaving
/// a non-empty remainder.
pub fn candidate_values(parts: &[u64], max_singular: usize) -> BTreeSet<u64> {
    let mut gcds = BTreeSet::new();
    // distinct values of T only matter through the multiset of removed parts;
    // enumerate index subsets of size ≤ max_singular
    let p = parts.len();
    let cap = max_singular.min(3).min(p.saturating_sub(1));
    let mut stack = vec![(0usize, 0usize, 0u64)]; // (next index, removed, gcd so far of kept)
    // simple recursion over "keep or drop" with at most `cap` drops
    fn rec(parts: &[u64], i: usize, dropped: usize, cap: usize, g: u64, gcds: &mut BTreeSet<u64>) {
        if i == parts.len() {
            if g > 0 {
                gcds.insert(g);
            }
            return;
        }
        rec(parts, i + 1, dropped, cap, g.gcd(&parts[i]), gcds);
        if dropped < cap {
            rec(parts, i + 1, dropped + 1, cap, g, gcds);
        }
    }
    stack.clear();
    rec(parts, 0, 0, cap, 0, &mut gcds);
    let mut out = BTreeSet::new();
    for g in gcds {
        for d in divisors(g) {
            if d >= 2 {
                out.insert(d);
            }
        }
    }
    out
}

/// Enumerates assignments whose pullback has at most `max_singular` singular
/// points: subsets `S` of partition indices with `|S| ∈ {2,3}` and good
/// induced signature, candidate values per index from [`candidate_values`],
/// deduplicated, in a fixed canonical order.
pub fn enumerate_assignments(datum: &BranchDatum, max_singular: usize) -> Vec<OrbifoldAssignment> {
    assert!(max_singular <= 3);
    let q = datum.q();
    let cands: Vec<Vec<u64>> = datum
        .partitions()
        .iter()
        .map(|p| {
            candidate_values(p.parts(), max_singular)
                .into_iter()
                .collect()
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |entries: BTreeMap<usize, u64>, out: &mut Vec<OrbifoldAssignment>| {
        let asg = OrbifoldAssignment::new(entries).unwrap();
        if !asg.induced_signature().is_good() {
            return;
        }
        let pb = pullback(datum, &asg).unwrap();
        if pb.signature.values().len() > max_singular {
            return;
        }
        if seen.insert(asg.clone()) {
            out.push(asg);
        }
    };
    // |S| = 2: good requires equal values
    for i in 0..q {
        for j in (i + 1)..q {
            for &v in &cands[i] {
                if cands[j].contains(&v) {
                    push([(i, v), (j, v)].into_iter().collect(), &mut out);
                }
            }
        }
    }
    // |S| = 3
    for i in 0..q {
        for j in (i + 1)..q {
            for k in (j + 1)..q {
                for &vi in &cands[i] {
                    for &vj in &cands[j] {
                        for &vk in &cands[k] {
                            push(
                                [(i, vi), (j, vj), (k, vk)].into_iter().collect(),
                                &mut out,
                            );
                        }
                    }
                }
            }
        }
    }
    out
}
