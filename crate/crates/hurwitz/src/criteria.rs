//! Certificate-producing non-realizability checks.
//!
//! Every check is a necessary condition for realizability: a returned
//! certificate proves the datum non-realizable. The checks are independent
//! and sound on their own; [`certify`] runs them cheapest-first and falls
//! back to the exhaustive oracle when enabled.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::datum::{rh_genus, BranchDatum, Partition};
use crate::oracle::{find_constellation, Constellation, SearchLimits, SearchOutcome};
use crate::orbifold::{enumerate_assignments, pullback, OrbifoldAssignment, PullbackKind};

/// Default exhaustion bound for the degree of the right factor `t` in
/// [`compose_feasible`].
pub const DEFAULT_COMPOSE_BOUND: u64 = 6;

/// Bumped whenever certificate semantics change; cached verdicts carrying a
/// different tag are recomputed.
pub const CRITERIA_VERSION: &str = "criteria-1";

/// Largest left-factor degree for which the genus-1 check enumerates
/// candidate factor data exhaustively; admissible degrees beyond it make the
/// check abstain.
const T3_CANDIDATE_DEGREE_BOUND: u64 = 6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CriteriaError {
    #[error("t degree {0} exceeds the exhaustion bound {1}")]
    ComposeBound(u64, u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    #[serde(rename = "t1-bad")]
    T1Bad,
    #[serde(rename = "t0-divisibility")]
    T0Divisibility,
    #[serde(rename = "t0-chain-rule")]
    T0ChainRule,
    #[serde(rename = "t2-divisibility")]
    T2Divisibility,
    #[serde(rename = "t2-decomposition")]
    T2Decomposition,
    #[serde(rename = "t3-decomposition")]
    T3Decomposition,
    /// Wrapper around the certificate of a residual datum forced by a
    /// decomposition argument.
    #[serde(rename = "recursive")]
    Recursive,
    #[serde(rename = "oracle-exhausted")]
    OracleExhausted,
}

impl std::fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CertificateKind::T1Bad => "t1-bad",
            CertificateKind::T0Divisibility => "t0-divisibility",
            CertificateKind::T0ChainRule => "t0-chain-rule",
            CertificateKind::T2Divisibility => "t2-divisibility",
            CertificateKind::T2Decomposition => "t2-decomposition",
            CertificateKind::T3Decomposition => "t3-decomposition",
            CertificateKind::Recursive => "recursive",
            CertificateKind::OracleExhausted => "oracle-exhausted",
        };
        f.write_str(s)
    }
}

/// A re-checkable proof of non-realizability.
///
/// `assignment` holds 1-based `(partition index, ν)` pairs; `facts` is the
/// kind-specific arithmetic record; `residual` carries certificates of
/// residual data for decomposition arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub assignment: Option<Vec<(usize, u64)>>,
    pub facts: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<Vec<Certificate>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Realizable(Constellation),
    NonRealizable(Certificate),
    Unknown(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub use_oracle: bool,
    pub oracle_limits: SearchLimits,
    pub compose_bound: u64,
    pub max_recursion: u32,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            use_oracle: true,
            oracle_limits: SearchLimits::default(),
            compose_bound: DEFAULT_COMPOSE_BOUND,
            max_recursion: 3,
        }
    }
}

fn one_based(asg: &OrbifoldAssignment) -> Vec<(usize, u64)> {
    asg.entries().iter().map(|(&i, &v)| (i + 1, v)).collect()
}

fn from_one_based(pairs: &[(usize, u64)]) -> Option<OrbifoldAssignment> {
    let shifted: Vec<(usize, u64)> = pairs
        .iter()
        .map(|&(i, v)| i.checked_sub(1).map(|i0| (i0, v)))
        .collect::<Option<_>>()?;
    OrbifoldAssignment::from_pairs(&shifted).ok()
}

/// Bad-pullback check: a rational function pulls every good orbifold back to
/// a good orbifold, so a good assignment with a bad pullback is a
/// contradiction.
pub fn check_t1_bad(datum: &BranchDatum) -> Option<Certificate> {
    if datum.genus() != 0 {
        return None;
    }
    for asg in enumerate_assignments(datum, 2) {
        let Ok(pb) = pullback(datum, &asg) else {
            continue;
        };
        if pb.kind == PullbackKind::Bad {
            return Some(Certificate {
                kind: CertificateKind::T1Bad,
                assignment: Some(one_based(&asg)),
                facts: json!({
                    "orbifold": asg.induced_signature().to_string(),
                    "pullback": pb.signature.to_string(),
                }),
                residual: None,
            });
        }
    }
    None
}

/// Theta-degree divisibility: a non-ramified pullback forces
/// `f = θ_𝒪 ∘ q`, hence `deg θ_𝒪 | n`.
pub fn check_t0_divisibility(datum: &BranchDatum) -> Option<Certificate> {
    if datum.genus() != 0 {
        return None;
    }
    let n = datum.n();
    for asg in enumerate_assignments(datum, 0) {
        let Ok(pb) = pullback(datum, &asg) else {
            continue;
        };
        if pb.kind != PullbackKind::NonRamified {
            continue;
        }
        let sig = asg.induced_signature();
        let Ok(theta) = sig.theta_degree() else {
            continue;
        };
        if n % theta != 0 {
            return Some(Certificate {
                kind: CertificateKind::T0Divisibility,
                assignment: Some(one_based(&asg)),
                facts: json!({
                    "orbifold": sig.to_string(),
                    "theta": theta,
                    "n": n,
                }),
                residual: None,
            });
        }
    }
    None
}

/// Chain-rule refinement of the non-ramified case: with `f = θ_𝒪 ∘ q` and
/// `deg q = n / deg θ_𝒪`, every local degree `e` at a point over the
/// singular value `ν` factors as `e = ν · e_q`, so `e/ν ≤ deg q`.
pub fn check_t0_chainrule(datum: &BranchDatum) -> Option<Certificate> {
    if datum.genus() != 0 {
        return None;
    }
    let n = datum.n();
    for asg in enumerate_assignments(datum, 0) {
        let Ok(pb) = pullback(datum, &asg) else {
            continue;
        };
        if pb.kind != PullbackKind::NonRamified {
            continue;
        }
        let sig = asg.induced_signature();
        let Ok(theta) = sig.theta_degree() else {
            continue;
        };
        if n % theta != 0 {
            continue;
        }
        let deg_q = n / theta;
        for (&i, &nu) in asg.entries() {
            for &e in datum.partitions()[i].parts() {
                if e % nu == 0 && e / nu > deg_q {
                    return Some(Certificate {
                        kind: CertificateKind::T0ChainRule,
                        assignment: Some(one_based(&asg)),
                        facts: json!({
                            "orbifold": sig.to_string(),
                            "theta": theta,
                            "deg_q": deg_q,
                            "index": i + 1,
                            "entry": e,
                            "nu": nu,
                            "forced_order": e / nu,
                        }),
                        residual: None,
                    });
                }
            }
        }
    }
    None
}

/// Positive-characteristic divisibility: a good-positive pullback forces
/// `deg θ_{f*(𝒪)} · n ≡ 0 (mod deg θ_𝒪)`.
pub fn check_t2_divisibility(datum: &BranchDatum) -> Option<Certificate> {
    if datum.genus() != 0 {
        return None;
    }
    let n = datum.n();
    for asg in enumerate_assignments(datum, 3) {
        let Ok(pb) = pullback(datum, &asg) else {
            continue;
        };
        if pb.kind != PullbackKind::GoodPositive {
            continue;
        }
        let sig = asg.induced_signature();
        let Ok(theta_o) = sig.theta_degree() else {
            continue;
        };
        let Ok(theta_pb) = pb.signature.theta_degree() else {
            continue;
        };
        if (theta_pb * n) % theta_o != 0 {
            return Some(Certificate {
                kind: CertificateKind::T2Divisibility,
                assignment: Some(one_based(&asg)),
                facts: json!({
                    "orbifold": sig.to_string(),
                    "pullback": pb.signature.to_string(),
                    "theta_orbifold": theta_o,
                    "theta_pullback": theta_pb,
                    "n": n,
                    "product": theta_pb * n,
                }),
                residual: None,
            });
        }
    }
    None
}

/// The degrees of the forced decomposition `f = w ∘ t` of a function whose
/// pullback is good-positive: `deg w = χ(f*(𝒪))/χ(𝒪)` and `deg t = n/deg w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForcedFactor {
    pub deg_w: u64,
    pub deg_t: u64,
}

pub fn forced_factor(
    datum: &BranchDatum,
    asg: &OrbifoldAssignment,
) -> Result<ForcedFactor, String> {
    let pb = pullback(datum, asg).map_err(|e| e.to_string())?;
    if pb.kind != PullbackKind::GoodPositive {
        return Err(format!("pullback is {:?}, not good-positive", pb.kind));
    }
    let sig = asg.induced_signature();
    let chi_o = sig.chi();
    if chi_o <= num_rational::Ratio::from_integer(0) {
        return Err("orbifold has non-positive Euler characteristic".into());
    }
    let ratio = pb.chi / chi_o;
    if !ratio.is_integer() || ratio <= num_rational::Ratio::from_integer(0) {
        return Err(format!("deg w = {ratio} is not a positive integer"));
    }
    let deg_w = *ratio.numer() as u64;
    let n = datum.n();
    if n % deg_w != 0 {
        return Err(format!("deg t = {n}/{deg_w} is not an integer"));
    }
    Ok(ForcedFactor {
        deg_w,
        deg_t: n / deg_w,
    })
}

/// Witness that `target` could be the branch datum of `w ∘ t`: the injection
/// of `w`'s critical values into `target`'s partitions and the forced branch
/// datum of `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchWitness {
    /// `mapping[i]` = 0-based target partition index matched to the i-th
    /// partition of the left factor.
    pub mapping: Vec<usize>,
    pub t_datum: BranchDatum,
}

/// All ways `target` can arise as the datum of `w ∘ t` with `deg t = r`,
/// collected as distinct forced `t` data (at most one witness per `t` datum).
///
/// This is a necessary condition only: an empty result certifies that no
/// composition exists; a non-empty one does not certify existence.
pub fn compose_matches(
    w: &BranchDatum,
    t_degree: u64,
    target: &BranchDatum,
    bound: u64,
) -> Result<Vec<MatchWitness>, CriteriaError> {
    if t_degree > bound {
        return Err(CriteriaError::ComposeBound(t_degree, bound));
    }
    let r = t_degree;
    let m = w.n();
    if m * r != target.n() || r == 0 {
        return Ok(vec![]);
    }
    let wq = w.q();
    let tq = target.q();
    if wq > tq {
        return Ok(vec![]);
    }
    let mut witnesses: Vec<MatchWitness> = Vec::new();
    let mut seen: BTreeSet<BranchDatum> = BTreeSet::new();
    let mut mapping = vec![usize::MAX; wq];
    let mut used = vec![false; tq];
    inject(
        w, r, target, 0, &mut mapping, &mut used, &mut seen, &mut witnesses,
    );
    Ok(witnesses)
}

/// First witness of [`compose_matches`] with the default bound.
pub fn compose_feasible(
    w: &BranchDatum,
    t_degree: u64,
    target: &BranchDatum,
) -> Result<Option<MatchWitness>, CriteriaError> {
    Ok(compose_matches(w, t_degree, target, DEFAULT_COMPOSE_BOUND)?
        .into_iter()
        .next())
}

fn inject(
    w: &BranchDatum,
    r: u64,
    target: &BranchDatum,
    level: usize,
    mapping: &mut Vec<usize>,
    used: &mut Vec<bool>,
    seen: &mut BTreeSet<BranchDatum>,
    out: &mut Vec<MatchWitness>,
) {
    if level == w.q() {
        expand_injection(w, r, target, mapping, used, seen, out);
        return;
    }
    for t_idx in 0..target.q() {
        if used[t_idx] {
            continue;
        }
        used[t_idx] = true;
        mapping[level] = t_idx;
        inject(w, r, target, level + 1, mapping, used, seen, out);
        used[t_idx] = false;
    }
}

fn expand_injection(
    w: &BranchDatum,
    r: u64,
    target: &BranchDatum,
    mapping: &[usize],
    used: &[bool],
    seen: &mut BTreeSet<BranchDatum>,
    out: &mut Vec<MatchWitness>,
) {
    // per matched target partition: the possible multisets of non-trivial
    // local-degree partitions of t above that value
    let mut choice_sets: Vec<Vec<Vec<Partition>>> = Vec::new();
    for (i, &t_idx) in mapping.iter().enumerate() {
        let opts = decompositions(
            target.partitions()[t_idx].parts(),
            w.partitions()[i].parts(),
            r,
        );
        if opts.is_empty() {
            return;
        }
        choice_sets.push(opts.into_iter().collect());
    }
    // unmatched target partitions sit over generic values of w: m points of
    // local degree 1 each
    let generic_blocks: Vec<u64> = vec![1; w.n() as usize];
    for (t_idx, &u) in used.iter().enumerate() {
        if !u {
            let opts = decompositions(target.partitions()[t_idx].parts(), &generic_blocks, r);
            if opts.is_empty() {
                return;
            }
            choice_sets.push(opts.into_iter().collect());
        }
    }
    // cartesian product over the choice sets
    let mut idx = vec![0usize; choice_sets.len()];
    loop {
        let mut t_parts: Vec<Partition> = Vec::new();
        for (set, &k) in choice_sets.iter().zip(idx.iter()) {
            t_parts.extend(set[k].iter().cloned());
        }
        if rh_genus(&t_parts) == Ok(target.genus()) {
            if let Ok(t_datum) = BranchDatum::new(t_parts, r, target.genus()) {
                if seen.insert(t_datum.clone()) {
                    out.push(MatchWitness {
                        mapping: mapping.to_vec(),
                        t_datum,
                    });
                }
            }
        }
        // advance the multi-index
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < choice_sets[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// All ways to write the multiset `parts` as a disjoint union `⊎ eⱼ·λⱼ`
/// over the blocks `e₁..e_B` with each `λⱼ ⊢ r`; returns the distinct
/// multisets of non-trivial `λ`s.
fn decompositions(parts: &[u64], blocks: &[u64], r: u64) -> BTreeSet<Vec<Partition>> {
    let total: u64 = parts.iter().sum();
    if total != blocks.iter().sum::<u64>() * r {
        return BTreeSet::new();
    }
    // group equal parts to avoid permutation blowup
    let mut groups: Vec<(u64, u64)> = Vec::new();
    for &p in parts {
        match groups.iter_mut().find(|(v, _)| *v == p) {
            Some((_, c)) => *c += 1,
            None => groups.push((p, 1)),
        }
    }
    let mut caps: Vec<u64> = blocks.iter().map(|&e| e * r).collect();
    let mut lambda: Vec<Vec<u64>> = vec![Vec::new(); blocks.len()];
    let mut out = BTreeSet::new();
    fill_groups(&groups, 0, blocks, &mut caps, &mut lambda, &mut out);
    out
}

fn fill_groups(
    groups: &[(u64, u64)],
    g: usize,
    blocks: &[u64],
    caps: &mut Vec<u64>,
    lambda: &mut Vec<Vec<u64>>,
    out: &mut BTreeSet<Vec<Partition>>,
) {
    if g == groups.len() {
        debug_assert!(caps.iter().all(|&c| c == 0));
        let mut nontrivial: Vec<Partition> = lambda
            .iter()
            .filter(|l| l.iter().any(|&x| x > 1))
            .map(|l| Partition::new(l.clone()).unwrap())
            .collect();
        nontrivial.sort_unstable();
        out.insert(nontrivial);
        return;
    }
    let (value, count) = groups[g];
    distribute(groups, g, value, count, 0, blocks, caps, lambda, out);
}

/// Distributes `count` copies of `value` over blocks `j..`, honoring the
/// divisibility `eⱼ | value` and remaining capacities.
#[allow(clippy::too_many_arguments)]
fn distribute(
    groups: &[(u64, u64)],
    g: usize,
    value: u64,
    count: u64,
    j: usize,
    blocks: &[u64],
    caps: &mut Vec<u64>,
    lambda: &mut Vec<Vec<u64>>,
    out: &mut BTreeSet<Vec<Partition>>,
) {
    if count == 0 {
        fill_groups(groups, g + 1, blocks, caps, lambda, out);
        return;
    }
    if j == blocks.len() {
        return;
    }
    let e = blocks[j];
    let max_here = if value % e == 0 {
        (caps[j] / value).min(count)
    } else {
        0
    };
    for take in (0..=max_here).rev() {
        caps[j] -= take * value;
        for _ in 0..take {
            lambda[j].push(value / e);
        }
        distribute(groups, g, value, count - take, j + 1, blocks, caps, lambda, out);
        for _ in 0..take {
            lambda[j].pop();
        }
        caps[j] += take * value;
    }
}

/// The branch data of the compositional left factors of a dihedral
/// universal covering, by factor degree `k`.
pub fn dihedral_left_factors(k: u64) -> Vec<BranchDatum> {
    let strip = |parts: Vec<Vec<u64>>| -> Option<BranchDatum> {
        let ps: Vec<Partition> = parts
            .into_iter()
            .map(|p| Partition::new(p).unwrap())
            .filter(|p| !p.is_trivial())
            .collect();
        BranchDatum::new(ps, k, 0).ok()
    };
    let twos = |c: u64| -> Vec<u64> { std::iter::repeat(2).take(c as usize).collect() };
    let mut out: Vec<BranchDatum> = Vec::new();
    if k < 2 {
        return out;
    }
    if k % 2 == 0 {
        let mut second = twos(k / 2 - 1);
        second.push(1);
        second.push(1);
        if let Some(d) = strip(vec![twos(k / 2), second, vec![k]]) {
            out.push(d);
        }
        if let Some(d) = strip(vec![twos(k / 2), twos(k / 2), vec![k / 2, k / 2]]) {
            if !out.contains(&d) {
                out.push(d);
            }
        }
    } else {
        let mut half = twos((k - 1) / 2);
        half.push(1);
        if let Some(d) = strip(vec![half.clone(), half, vec![k]]) {
            out.push(d);
        }
    }
    out
}

/// Dihedral decomposition check: a good-positive pullback of `{2,2,d}` with
/// `ν(f*(𝒪)) ≠ ν(𝒪)` forces `f = w ∘ t` where `w` is a left factor of the
/// dihedral covering with a known branch datum; if no composition matches,
/// the datum is non-realizable.
pub fn check_t2_decomposition(datum: &BranchDatum) -> Option<Certificate> {
    check_t2_decomposition_with(datum, DEFAULT_COMPOSE_BOUND)
}

fn check_t2_decomposition_with(datum: &BranchDatum, bound: u64) -> Option<Certificate> {
    if datum.genus() != 0 {
        return None;
    }
    for asg in enumerate_assignments(datum, 3) {
        let sig = asg.induced_signature();
        if !matches!(sig.values(), [2, 2, _]) {
            continue;
        }
        let Ok(pb) = pullback(datum, &asg) else {
            continue;
        };
        if pb.kind != PullbackKind::GoodPositive || pb.signature == sig {
            continue;
        }
        let Ok(ff) = forced_factor(datum, &asg) else {
            continue;
        };
        if ff.deg_w < 2 {
            continue;
        }
        let factors = dihedral_left_factors(ff.deg_w);
        if factors.is_empty() {
            continue;
        }
        let mut all_infeasible = true;
        for w in &factors {
            match compose_matches(w, ff.deg_t, datum, bound) {
                Ok(ms) if ms.is_empty() => {}
                _ => {
                    all_infeasible = false;
                    break;
                }
            }
        }
        if all_infeasible {
            return Some(Certificate {
                kind: CertificateKind::T2Decomposition,
                assignment: Some(one_based(&asg)),
                facts: json!({
                    "orbifold": sig.to_string(),
                    "pullback": pb.signature.to_string(),
                    "deg_w": ff.deg_w,
                    "deg_t": ff.deg_t,
                    "left_factors": factors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                }),
                residual: None,
            });
        }
    }
    None
}

/// Candidate left factors for the genus-1 decomposition with `𝒪 = {2,3,3}`:
/// realizable genus-0 data `W` of degree `deg_w` admitting a placement of
/// the values `{2,3,3}` whose pullback signature is `{m,m}` with
/// `m = 12/deg_w` (trivial when `m = 1`), or `{2,2,2}` when `m = 4`.
fn t3_candidates(deg_w: u64) -> Vec<BranchDatum> {
    let m = 12 / deg_w;
    let wanted: Vec<Vec<u64>> = if m == 1 {
        vec![vec![]]
    } else if m == 4 {
        vec![vec![4, 4], vec![2, 2, 2]]
    } else {
        vec![vec![m, m]]
    };
    let mut out = Vec::new();
    for w in crate::generators::enumerate_data(deg_w, 0, usize::MAX) {
        if !placements_reach(&w, &[2, 3, 3], &wanted) {
            continue;
        }
        // the factor must itself exist
        if matches!(
            find_constellation(&w, &SearchLimits::default()),
            SearchOutcome::Found(_)
        ) {
            out.push(w);
        }
    }
    out
}

/// Whether some placement of the orbifold values onto the partitions of `w`
/// (injectively) or onto generic points produces one of the wanted pullback
/// signatures.
fn placements_reach(w: &BranchDatum, values: &[u64], wanted: &[Vec<u64>]) -> bool {
    fn rec(
        w: &BranchDatum,
        values: &[u64],
        k: usize,
        used: &mut Vec<bool>,
        acc: &mut Vec<u64>,
        wanted: &[Vec<u64>],
    ) -> bool {
        if k == values.len() {
            let mut sig = acc.clone();
            sig.sort_unstable();
            return wanted.iter().any(|want| *want == sig);
        }
        let nu = values[k];
        // at a critical value: entries e ↦ ν/gcd(e,ν), keep > 1
        for i in 0..w.q() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let added: Vec<u64> = w.partitions()[i]
                .parts()
                .iter()
                .map(|&e| nu / gcd(e, nu))
                .filter(|&v| v > 1)
                .collect();
            acc.extend(&added);
            if rec(w, values, k + 1, used, acc, wanted) {
                acc.truncate(acc.len() - added.len());
                used[i] = false;
                return true;
            }
            acc.truncate(acc.len() - added.len());
            used[i] = false;
        }
        // at a generic value: n points of local degree 1, each of value ν
        let count = w.n() as usize;
        acc.extend(std::iter::repeat(nu).take(count));
        let hit = rec(w, values, k + 1, used, acc, wanted);
        acc.truncate(acc.len() - count);
        hit
    }
    rec(
        w,
        values,
        0,
        &mut vec![false; w.q()],
        &mut Vec::new(),
        wanted,
    )
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Genus-1 decomposition check for `𝒪 = {2,3,3}`: a non-ramified pullback
/// forces `f = w ∘ t` where `w` is a left factor of the degree-12 covering
/// with `w*(𝒪)` of signature `{d,d}` or `{2,2,2}`. The datum is certified
/// non-realizable when every candidate factor either admits no composition
/// match or forces only residual `t` data that are themselves certified
/// non-realizable (recursively).
pub fn check_t3(datum: &BranchDatum) -> Option<Certificate> {
    check_t3_with(datum, &CertifyOptions::default(), 0)
}

fn check_t3_with(datum: &BranchDatum, opts: &CertifyOptions, depth: u32) -> Option<Certificate> {
    if datum.genus() != 1 {
        return None;
    }
    let n = datum.n();
    for asg in enumerate_assignments(datum, 0) {
        let sig = asg.induced_signature();
        // only the tetrahedral signature has a complete candidate table here;
        // {d,d} and {2,2,2} are exempt in the theorem, the other triangle
        // signatures are out of scope
        if sig.values() != [2, 3, 3] {
            continue;
        }
        let Ok(pb) = pullback(datum, &asg) else {
            continue;
        };
        if pb.kind != PullbackKind::NonRamified {
            continue;
        }
        let mut candidate_notes: Vec<serde_json::Value> = Vec::new();
        let mut residuals: Vec<Certificate> = Vec::new();
        let mut sound = true;
        for deg_w in [2u64, 3, 4, 6, 12] {
            if n % deg_w != 0 {
                continue;
            }
            let deg_t = n / deg_w;
            if deg_t < 2 {
                // t maps a torus onto the sphere: degree ≥ 2
                continue;
            }
            if deg_w > T3_CANDIDATE_DEGREE_BOUND {
                sound = false;
                break;
            }
            for w in t3_candidates(deg_w) {
                let ms = match compose_matches(&w, deg_t, datum, opts.compose_bound) {
                    Ok(ms) => ms,
                    Err(_) => {
                        sound = false;
                        break;
                    }
                };
                if ms.is_empty() {
                    candidate_notes.push(json!({
                        "left_factor": w.to_string(),
                        "deg_t": deg_t,
                        "outcome": "compose-infeasible",
                    }));
                    continue;
                }
                if depth >= opts.max_recursion {
                    sound = false;
                    break;
                }
                for wit in &ms {
                    match certify_inner(&wit.t_datum, opts, depth + 1) {
                        Verdict::NonRealizable(inner) => {
                            residuals.push(Certificate {
                                kind: CertificateKind::Recursive,
                                assignment: None,
                                facts: json!({
                                    "datum": wit.t_datum.to_string(),
                                    "left_factor": w.to_string(),
                                }),
                                residual: Some(vec![inner]),
                            });
                        }
                        _ => {
                            sound = false;
                            break;
                        }
                    }
                }
                if !sound {
                    break;
                }
                candidate_notes.push(json!({
                    "left_factor": w.to_string(),
                    "deg_t": deg_t,
                    "outcome": "residual-non-realizable",
                }));
            }
            if !sound {
                break;
            }
        }
        if sound {
            return Some(Certificate {
                kind: CertificateKind::T3Decomposition,
                assignment: Some(one_based(&asg)),
                facts: json!({
                    "orbifold": sig.to_string(),
                    "candidates": candidate_notes,
                }),
                residual: if residuals.is_empty() {
                    None
                } else {
                    Some(residuals)
                },
            });
        }
    }
    None
}

/// Runs the cascade (bad pullback → divisibility → chain rule →
/// positive-characteristic divisibility → dihedral decomposition → genus-1
/// decomposition) and falls back to the oracle when enabled.
pub fn certify(datum: &BranchDatum, opts: &CertifyOptions) -> Verdict {
    certify_inner(datum, opts, 0)
}

fn certify_inner(datum: &BranchDatum, opts: &CertifyOptions, depth: u32) -> Verdict {
    let mut notes: Vec<String> = Vec::new();
    if datum.genus() == 0 {
        let checks: [(&str, fn(&BranchDatum) -> Option<Certificate>); 4] = [
            ("t1-bad", check_t1_bad),
            ("t0-divisibility", check_t0_divisibility),
            ("t0-chain-rule", check_t0_chainrule),
            ("t2-divisibility", check_t2_divisibility),
        ];
        for (name, check) in checks {
            if let Some(cert) = check(datum) {
                return Verdict::NonRealizable(cert);
            }
            notes.push(format!("{name}: no certificate"));
        }
        if let Some(cert) = check_t2_decomposition_with(datum, opts.compose_bound) {
            return Verdict::NonRealizable(cert);
        }
        notes.push("t2-decomposition: no certificate".into());
    } else if datum.genus() == 1 {
        if let Some(cert) = check_t3_with(datum, opts, depth) {
            return Verdict::NonRealizable(cert);
        }
        notes.push("t3-decomposition: no certificate".into());
    } else {
        notes.push(format!("no criteria for genus {}", datum.genus()));
    }
    if opts.use_oracle {
        match find_constellation(datum, &opts.oracle_limits) {
            SearchOutcome::Found(c) => return Verdict::Realizable(c),
            SearchOutcome::Exhausted => {
                return Verdict::NonRealizable(Certificate {
                    kind: CertificateKind::OracleExhausted,
                    assignment: None,
                    facts: json!({ "n": datum.n(), "search": "exhaustive" }),
                    residual: None,
                })
            }
            SearchOutcome::Aborted(reason) => notes.push(format!("oracle: {reason}")),
        }
    } else {
        notes.push("oracle disabled".into());
    }
    Verdict::Unknown(notes)
}

/// Independently re-checks a certificate against the datum: recomputes the
/// pullback and all arithmetic facts from scratch. Returns false on any
/// mismatch.
pub fn verify_certificate(datum: &BranchDatum, cert: &Certificate) -> bool {
    let asg = || -> Option<OrbifoldAssignment> {
        cert.assignment.as_deref().and_then(from_one_based)
    };
    match cert.kind {
        CertificateKind::T1Bad => {
            if datum.genus() != 0 {
                return false;
            }
            let Some(asg) = asg() else { return false };
            if !asg.induced_signature().is_good() {
                return false;
            }
            matches!(pullback(datum, &asg), Ok(pb) if pb.kind == PullbackKind::Bad)
        }
        CertificateKind::T0Divisibility => {
            if datum.genus() != 0 {
                return false;
            }
            let Some(asg) = asg() else { return false };
            let Ok(pb) = pullback(datum, &asg) else {
                return false;
            };
            let Ok(theta) = asg.induced_signature().theta_degree() else {
                return false;
            };
            pb.kind == PullbackKind::NonRamified && datum.n() % theta != 0
        }
        CertificateKind::T0ChainRule => {
            if datum.genus() != 0 {
                return false;
            }
            let Some(asg) = asg() else { return false };
            let Ok(pb) = pullback(datum, &asg) else {
                return false;
            };
            let Ok(theta) = asg.induced_signature().theta_degree() else {
                return false;
            };
            if pb.kind != PullbackKind::NonRamified || datum.n() % theta != 0 {
                return false;
            }
            let deg_q = datum.n() / theta;
            asg.entries().iter().any(|(&i, &nu)| {
                datum.partitions()[i]
                    .parts()
                    .iter()
                    .any(|&e| e % nu == 0 && e / nu > deg_q)
            })
        }
        CertificateKind::T2Divisibility => {
            if datum.genus() != 0 {
                return false;
            }
            let Some(asg) = asg() else { return false };
            let Ok(pb) = pullback(datum, &asg) else {
                return false;
            };
            if pb.kind != PullbackKind::GoodPositive {
                return false;
            }
            let (Ok(to), Ok(tp)) = (
                asg.induced_signature().theta_degree(),
                pb.signature.theta_degree(),
            ) else {
                return false;
            };
            (tp * datum.n()) % to != 0
        }
        CertificateKind::T2Decomposition => {
            if datum.genus() != 0 {
                return false;
            }
            let Some(asg) = asg() else { return false };
            let sig = asg.induced_signature();
            if !matches!(sig.values(), [2, 2, _]) {
                return false;
            }
            let Ok(pb) = pullback(datum, &asg) else {
                return false;
            };
            if pb.kind != PullbackKind::GoodPositive || pb.signature == sig {
                return false;
            }
            let Ok(ff) = forced_factor(datum, &asg) else {
                return false;
            };
            let factors = dihedral_left_factors(ff.deg_w);
            !factors.is_empty()
                && factors.iter().all(|w| {
                    matches!(
                        compose_matches(w, ff.deg_t, datum, DEFAULT_COMPOSE_BOUND),
                        Ok(ms) if ms.is_empty()
                    )
                })
        }
        CertificateKind::T3Decomposition => {
            if datum.genus() != 1 {
                return false;
            }
            let Some(asg) = asg() else { return false };
            let sig = asg.induced_signature();
            if sig.values() != [2, 3, 3] {
                return false;
            }
            let Ok(pb) = pullback(datum, &asg) else {
                return false;
            };
            if pb.kind != PullbackKind::NonRamified {
                return false;
            }
            // index residual certificates by the residual datum string
            let mut by_datum: BTreeMap<String, &Certificate> = BTreeMap::new();
            for r in cert.residual.iter().flatten() {
                if r.kind != CertificateKind::Recursive {
                    return false;
                }
                let Some(ds) = r.facts.get("datum").and_then(|v| v.as_str()) else {
                    return false;
                };
                if !verify_certificate_str(ds, r) {
                    return false;
                }
                by_datum.insert(ds.to_string(), r);
            }
            let n = datum.n();
            for deg_w in [2u64, 3, 4, 6, 12] {
                if n % deg_w != 0 || n / deg_w < 2 {
                    continue;
                }
                if deg_w > T3_CANDIDATE_DEGREE_BOUND {
                    return false;
                }
                for w in t3_candidates(deg_w) {
                    let Ok(ms) = compose_matches(&w, n / deg_w, datum, DEFAULT_COMPOSE_BOUND)
                    else {
                        return false;
                    };
                    for wit in ms {
                        if !by_datum.contains_key(&wit.t_datum.to_string()) {
                            return false;
                        }
                    }
                }
            }
            true
        }
        CertificateKind::Recursive => {
            let Some(ds) = cert.facts.get("datum").and_then(|v| v.as_str()) else {
                return false;
            };
            verify_certificate_str(ds, cert) && ds.parse::<BranchDatum>().is_ok()
        }
        CertificateKind::OracleExhausted => matches!(
            find_constellation(datum, &SearchLimits::default()),
            SearchOutcome::Exhausted
        ),
    }
}

/// Verifies the inner certificates of a `recursive` wrapper against the
/// residual datum named in its facts.
fn verify_certificate_str(datum_str: &str, wrapper: &Certificate) -> bool {
    let Ok(residual_datum) = datum_str.parse::<BranchDatum>() else {
        return false;
    };
    match &wrapper.residual {
        Some(inner) if !inner.is_empty() => inner
            .iter()
            .all(|c| verify_certificate(&residual_datum, c)),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(s: &str) -> BranchDatum {
        s.parse().unwrap()
    }

    #[test]
    fn t1_bad_known_examples() {
        let d = datum("(2,2,2,2,1 | 3,3,3 | 3,3,3)");
        let cert = check_t1_bad(&d).expect("certificate");
        assert_eq!(cert.kind, CertificateKind::T1Bad);
        assert!(verify_certificate(&d, &cert));

        let d = datum("(2,2,2 | 2,2,2 | 2,4)");
        let cert = check_t1_bad(&d).expect("certificate");
        assert!(verify_certificate(&d, &cert));

        assert_eq!(check_t1_bad(&datum("(2,2 | 2,2 | 2,2)")), None);
    }

    #[test]
    fn t1_bad_simplest() {
        let d = datum("(2,2 | 2,2 | 1,3)");
        let cert = check_t1_bad(&d).expect("certificate");
        assert_eq!(cert.facts["pullback"], "{3}");
        assert!(verify_certificate(&d, &cert));
    }

    #[test]
    fn t0_divisibility_examples() {
        let d = datum("(4,2^7 | 3^6 | 3^6)");
        let cert = check_t0_divisibility(&d).expect("certificate");
        assert_eq!(cert.facts["theta"], 12);
        assert_eq!(cert.facts["n"], 18);
        assert!(verify_certificate(&d, &cert));

        let d = datum("(2^45 | 3^30 | 5^16,10)");
        let cert = check_t0_divisibility(&d).expect("certificate");
        assert_eq!(cert.facts["theta"], 60);
        assert!(verify_certificate(&d, &cert));
    }

    #[test]
    fn t0_divisibility_respects_genus_precondition() {
        // the degree-6 residual datum has genus 1; the rational-function
        // criteria do not apply, the oracle settles it instead
        let d = datum("(2^3 | 2^3 | 2^3 | 1,3,2) g=1");
        assert_eq!(check_t0_divisibility(&d), None);
    }

    #[test]
    fn t0_chainrule_example() {
        let d = datum("(9,3^5 | 3^8 | 2^12)");
        let cert = check_t0_chainrule(&d).expect("certificate");
        assert_eq!(cert.facts["deg_q"], 2);
        assert_eq!(cert.facts["forced_order"], 3);
        assert!(verify_certificate(&d, &cert));

        assert_eq!(check_t0_chainrule(&datum("(5 | 5)")), None);
        // theta does not divide n: precondition fails, divisibility fires
        assert_eq!(check_t0_chainrule(&datum("(4,2^7 | 3^6 | 3^6)")), None);
        assert!(check_t0_divisibility(&datum("(4,2^7 | 3^6 | 3^6)")).is_some());
    }

    #[test]
    fn t2_divisibility_examples() {
        let d = datum("(2^15 | 3^10 | 5^5,1,4)");
        let cert = check_t2_divisibility(&d).expect("certificate");
        assert_eq!(cert.facts["pullback"], "{5,5}");
        assert_eq!(cert.facts["product"], 150);
        assert_eq!(cert.facts["theta_orbifold"], 60);
        assert!(verify_certificate(&d, &cert));

        assert_eq!(check_t2_divisibility(&datum("(2^6 | 3^4 | 5^2,1,1)")), None);
        assert_eq!(check_t2_divisibility(&datum("(5 | 5)")), None);
    }

    #[test]
    fn forced_factor_thd_k4() {
        // canonical order: (4,4), (3,2,2,1), (2,2,2,2)
        let d = datum("(2^4 | 2^2,1,3 | 4,4)");
        let asg = OrbifoldAssignment::from_pairs(&[(0, 4), (1, 2), (2, 2)]).unwrap();
        let ff = forced_factor(&d, &asg).unwrap();
        assert_eq!(ff, ForcedFactor { deg_w: 4, deg_t: 2 });
    }

    #[test]
    fn forced_factor_inconsistent() {
        let d = datum("(2^15 | 3^10 | 5^5,1,4)");
        let asg = OrbifoldAssignment::from_pairs(&[(0, 5), (1, 3), (2, 2)]).unwrap();
        // deg_w = (2/5)/(1/30) = 12, deg_t = 30/12 is not an integer
        assert!(forced_factor(&d, &asg).is_err());
    }

    #[test]
    fn compose_identity() {
        let w = datum("(7 | 7)");
        let wit = compose_feasible(&w, 1, &w).unwrap().expect("witness");
        assert_eq!(wit.t_datum, BranchDatum::new(vec![], 1, 0).unwrap());
    }

    #[test]
    fn compose_power_maps() {
        // z³ ∘ t of degree 2 with composite ((6),(6)) forces t = ((2),(2))
        let w = datum("(3 | 3)");
        let target = datum("(6 | 6)");
        let ms = compose_matches(&w, 2, &target, 6).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].t_datum, datum("(2 | 2)"));
    }

    #[test]
    fn compose_infeasible_entry() {
        // the entry 3 of the target cannot be written as e_t·e_w
        let w = datum("(2,2 | 2,1,1 | 4)");
        let target = datum("(2^4 | 2^2,1,3 | 4,4)");
        assert!(compose_feasible(&w, 2, &target).unwrap().is_none());
    }

    #[test]
    fn compose_bound_errors() {
        let w = datum("(3 | 3)");
        let target = datum("(6 | 6)");
        assert_eq!(
            compose_matches(&w, 7, &target, 6),
            Err(CriteriaError::ComposeBound(7, 6))
        );
    }

    #[test]
    fn dihedral_factor_table() {
        assert_eq!(
            dihedral_left_factors(4),
            vec![datum("(2,2 | 2,1,1 | 4)"), datum("(2,2 | 2,2 | 2,2)")]
        );
        assert_eq!(dihedral_left_factors(3), vec![datum("(2,1 | 2,1 | 3)")]);
        assert_eq!(dihedral_left_factors(2), vec![datum("(2 | 2)")]);
    }

    #[test]
    fn t2_decomposition_thd() {
        for k in [4u64, 6] {
            let d = crate::generators::gen_series("thd", &[k]).unwrap();
            let cert = check_t2_decomposition(&d)
                .unwrap_or_else(|| panic!("certificate for k={k}"));
            assert_eq!(cert.facts["deg_w"], k);
            assert_eq!(cert.facts["deg_t"], 2);
            assert!(verify_certificate(&d, &cert));
        }
        assert_eq!(check_t2_decomposition(&datum("(2,2 | 2,2 | 2,2)")), None);
    }

    #[test]
    fn t3_wbd_k1() {
        let d = datum("(2,4 | 3,3 | 3,3) g=1");
        let cert = check_t3(&d).expect("certificate");
        assert_eq!(cert.kind, CertificateKind::T3Decomposition);
        assert!(cert.residual.is_none());
        assert!(verify_certificate(&d, &cert));
    }

    #[test]
    fn t3_koro_k1() {
        let d = datum("(2^9 | 3^6 | 3,9,6) g=1");
        let cert = check_t3(&d).expect("certificate");
        let residuals = cert.residual.as_ref().expect("recursive residual");
        let residual_data: Vec<&str> = residuals
            .iter()
            .map(|r| r.facts["datum"].as_str().unwrap())
            .collect();
        assert!(residual_data.contains(&"(3,2,1 | 2^3 | 2^3 | 2^3) n=6 g=1"));
        assert!(verify_certificate(&d, &cert));
    }

    #[test]
    fn t3_exempt_signature() {
        assert_eq!(check_t3(&datum("(3,3 | 3,3 | 3,3) g=1")), None);
    }

    #[test]
    fn certify_cascade() {
        let opts = CertifyOptions::default();
        match certify(&datum("(2,2 | 2,2 | 1,3)"), &opts) {
            Verdict::NonRealizable(c) => assert_eq!(c.kind, CertificateKind::T1Bad),
            v => panic!("expected NonRealizable, got {v:?}"),
        }
        assert!(matches!(
            certify(&datum("(5 | 5)"), &opts),
            Verdict::Realizable(_)
        ));
        assert!(matches!(
            certify(&datum("(2,2,1 | 3,1,1 | 5)"), &opts),
            Verdict::Realizable(_)
        ));
    }

    #[test]
    fn certify_without_oracle_is_unknown_on_realizable() {
        let opts = CertifyOptions {
            use_oracle: false,
            ..CertifyOptions::default()
        };
        assert!(matches!(
            certify(&datum("(2,2 | 2,2 | 2,2)"), &opts),
            Verdict::Unknown(_)
        ));
    }

    #[test]
    fn certificate_json_roundtrip() {
        let d = datum("(4,2^7 | 3^6 | 3^6)");
        let cert = check_t0_divisibility(&d).unwrap();
        let s = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&s).unwrap();
        assert_eq!(cert, back);
        assert!(verify_certificate(&d, &back));
    }

    #[test]
    fn verifier_rejects_mismatched_certificate() {
        let d = datum("(4,2^7 | 3^6 | 3^6)");
        let mut cert = check_t0_divisibility(&d).unwrap();
        cert.kind = CertificateKind::T1Bad;
        assert!(!verify_certificate(&d, &cert));
        // a certificate for a different datum must not verify
        let other = datum("(2,2 | 2,2 | 2,2)");
        let cert = check_t0_divisibility(&d).unwrap();
        assert!(!verify_certificate(&other, &cert));
    }
}
