//! Combinatorial maps (rotation systems) and the graph ↔ branch-datum
//! correspondence.
//!
//! A map on an oriented surface is encoded by its darts `1..=2E`, a
//! fixed-point-free involution `alpha` pairing darts into edges, and a
//! permutation `sigma` whose cycles give the counterclockwise order of
//! darts around each vertex. Faces are the cycles of `sigma ∘ alpha`, and
//! the genus follows from Euler's formula `V − E + F = 2 − 2g`.
//!
//! A connected genus-0 map with `E` edges corresponds, via midpoint
//! subdivision into a bipartite map, to the branch datum
//! `(vertex-degrees, (2^E), face-degrees)` of degree `2E` and genus 0,
//! which is always realizable. [`check_graph_hypotheses`] evaluates the
//! divisibility patterns that no planar graph may violate.

use crate::criteria::{check_t1_bad, Certificate};
use crate::datum::{BranchDatum, DatumError, Partition};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors raised by map construction, parsing, and conversion.
#[derive(Debug, Error)]
pub enum DessinError {
    /// Malformed map text.
    #[error("syntax error: {0}")]
    Syntax(String),
    /// Dart labels are not exactly `1..=2E`, or the pairing is not a
    /// fixed-point-free involution, or rotations repeat a dart.
    #[error("invalid dart structure: {0}")]
    InvalidDarts(String),
    /// The group generated by `sigma` and `alpha` is not transitive.
    #[error("map is not connected")]
    Disconnected,
    /// Conversion to a branch datum requires genus 0.
    #[error("map has genus {0}, expected 0")]
    NonZeroGenus(u64),
    /// The induced datum fails core validation (e.g. a single edge yields
    /// the trivial partition (1,1)).
    #[error("induced datum invalid: {0}")]
    Datum(#[from] DatumError),
}

/// A connected combinatorial map given by a rotation system.
///
/// Darts are `1..=2E` externally; internal storage is 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialMap {
    /// sigma\[d\] = next dart counterclockwise around the vertex of d.
    sigma: Vec<usize>,
    /// alpha\[d\] = the other dart of the edge containing d.
    alpha: Vec<usize>,
}

fn cycle_lengths(perm: &[usize]) -> Vec<u64> {
    let mut seen = vec![false; perm.len()];
    let mut lens = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            len += 1;
            d = perm[d];
        }
        lens.push(len);
    }
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens
}

fn count_cycles(perm: &[usize]) -> usize {
    cycle_lengths(perm).len()
}

/// True when `sigma` and `alpha` act transitively on the darts.
pub(crate) fn perms_connected(sigma: &[usize], alpha: &[usize]) -> bool {
    let n = sigma.len();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1;
    while let Some(d) = stack.pop() {
        for &next in &[sigma[d], alpha[d]] {
            if !seen[next] {
                seen[next] = true;
                reached += 1;
                stack.push(next);
            }
        }
    }
    reached == n
}

impl CombinatorialMap {
    /// Builds a map from 0-based permutation tables.
    ///
    /// Validates that both are permutations of the same even-length dart
    /// set, that `alpha` is a fixed-point-free involution, and that the map
    /// is connected.
    pub fn from_perms(sigma: Vec<usize>, alpha: Vec<usize>) -> Result<Self, DessinError> {
        let n = sigma.len();
        if alpha.len() != n {
            return Err(DessinError::InvalidDarts(
                "sigma and alpha act on different dart sets".into(),
            ));
        }
        if n == 0 || n % 2 != 0 {
            return Err(DessinError::InvalidDarts(format!(
                "dart count {n} is not a positive even number"
            )));
        }
        for perm in [&sigma, &alpha] {
            let mut hit = vec![false; n];
            for &d in perm.iter() {
                if d >= n || hit[d] {
                    return Err(DessinError::InvalidDarts("not a permutation".into()));
                }
                hit[d] = true;
            }
        }
        for d in 0..n {
            if alpha[d] == d {
                return Err(DessinError::InvalidDarts(format!(
                    "dart {} is paired with itself",
                    d + 1
                )));
            }
            if alpha[alpha[d]] != d {
                return Err(DessinError::InvalidDarts("pairing is not an involution".into()));
            }
        }
        if !perms_connected(&sigma, &alpha) {
            return Err(DessinError::Disconnected);
        }
        Ok(CombinatorialMap { sigma, alpha })
    }

    /// Builds a map from vertex rotations and edge pairs over 1-based darts.
    ///
    /// `rotations` lists the darts around each vertex in counterclockwise
    /// order; `edges` pairs darts. The darts mentioned must be exactly
    /// `1..=2E` with `E = edges.len()`.
    pub fn new(rotations: &[Vec<usize>], edges: &[(usize, usize)]) -> Result<Self, DessinError> {
        let n = 2 * edges.len();
        let mut sigma = vec![usize::MAX; n];
        let mut alpha = vec![usize::MAX; n];
        let to_index = |d: usize| -> Result<usize, DessinError> {
            if d == 0 || d > n {
                Err(DessinError::InvalidDarts(format!(
                    "dart {d} outside 1..={n}"
                )))
            } else {
                Ok(d - 1)
            }
        };
        for rot in rotations {
            if rot.is_empty() {
                return Err(DessinError::InvalidDarts("empty vertex rotation".into()));
            }
            for i in 0..rot.len() {
                let d = to_index(rot[i])?;
                if sigma[d] != usize::MAX {
                    return Err(DessinError::InvalidDarts(format!(
                        "dart {} appears in two rotations",
                        rot[i]
                    )));
                }
                sigma[d] = to_index(rot[(i + 1) % rot.len()])?;
            }
        }
        for &(a, b) in edges {
            let (a, b) = (to_index(a)?, to_index(b)?);
            if a == b {
                return Err(DessinError::InvalidDarts(format!(
                    "dart {} is paired with itself",
                    a + 1
                )));
            }
            if alpha[a] != usize::MAX || alpha[b] != usize::MAX {
                return Err(DessinError::InvalidDarts(format!(
                    "dart {} or {} is paired twice",
                    a + 1,
                    b + 1
                )));
            }
            alpha[a] = b;
            alpha[b] = a;
        }
        if sigma.contains(&usize::MAX) {
            return Err(DessinError::InvalidDarts(
                "some dart is missing from the vertex rotations".into(),
            ));
        }
        if alpha.contains(&usize::MAX) {
            return Err(DessinError::InvalidDarts(
                "some dart is missing from the edge pairing".into(),
            ));
        }
        Self::from_perms(sigma, alpha)
    }

    /// Number of darts (`2E`).
    pub fn dart_count(&self) -> usize {
        self.sigma.len()
    }

    /// Number of edges.
    pub fn edge_count(&self) -> u64 {
        (self.sigma.len() / 2) as u64
    }

    /// Vertex degrees (cycle lengths of `sigma`), descending. A loop
    /// contributes two units to its vertex.
    pub fn vertex_degrees(&self) -> Vec<u64> {
        cycle_lengths(&self.sigma)
    }

    /// Face degrees: the cycle lengths of `sigma ∘ alpha`, descending.
    pub fn face_degrees(&self) -> Vec<u64> {
        let phi: Vec<usize> = (0..self.sigma.len()).map(|d| self.sigma[self.alpha[d]]).collect();
        cycle_lengths(&phi)
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> u64 {
        count_cycles(&self.sigma) as u64
    }

    /// Number of faces.
    pub fn face_count(&self) -> u64 {
        self.face_degrees().len() as u64
    }

    /// Genus from Euler's formula `V − E + F = 2 − 2g`.
    pub fn genus(&self) -> u64 {
        let v = self.vertex_count() as i64;
        let e = self.edge_count() as i64;
        let f = self.face_count() as i64;
        let doubled = 2 - v + e - f;
        debug_assert!(doubled >= 0 && doubled % 2 == 0);
        (doubled / 2) as u64
    }

    /// Midpoint subdivision: every edge gains a white vertex of degree 2,
    /// with the original (black) vertices untouched.
    ///
    /// The new map has `2E` edges. Its `sigma ∘ alpha` cycles are twice as
    /// long as the original faces; under the bipartite convention (face
    /// degree = darts / 2) the face degrees are unchanged.
    pub fn subdivide_to_bipartite(&self) -> CombinatorialMap {
        let n = self.sigma.len();
        // Darts 0..n stay on black vertices; dart n+d sits at the white
        // midpoint of the edge {d, alpha(d)}.
        let mut sigma = vec![0usize; 2 * n];
        let mut alpha = vec![0usize; 2 * n];
        for d in 0..n {
            sigma[d] = self.sigma[d];
            sigma[n + d] = n + self.alpha[d];
            alpha[d] = n + d;
            alpha[n + d] = d;
        }
        CombinatorialMap::from_perms(sigma, alpha)
            .expect("subdivision of a valid map is valid")
    }

    /// The branch datum `(vertex-degrees, (2^E), face-degrees)` of degree
    /// `2E` and genus 0 realized by the bipartite subdivision's Belyi
    /// function.
    ///
    /// Requires genus 0; fails if the induced datum is degenerate (e.g. a
    /// single edge yields the trivial partition `(1,1)`).
    pub fn to_datum(&self) -> Result<BranchDatum, DessinError> {
        let g = self.genus();
        if g != 0 {
            return Err(DessinError::NonZeroGenus(g));
        }
        let e = self.edge_count();
        let vertices = Partition::new(self.vertex_degrees())?;
        let middles = Partition::new(vec![2; e as usize])?;
        let faces = Partition::new(self.face_degrees())?;
        Ok(BranchDatum::new(vec![vertices, middles, faces], 2 * e, 0)?)
    }
}

/// Standalone form of [`CombinatorialMap::to_datum`].
pub fn map_to_datum(map: &CombinatorialMap) -> Result<BranchDatum, DessinError> {
    map.to_datum()
}

/// Which divisibility pattern of the planar-graph corollaries a map
/// matches for moduli `(k, l)` on (faces, vertices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "pattern", rename_all = "kebab-case")]
pub enum GraphPattern {
    /// Every face degree divisible by `k` and every vertex degree by `l`.
    AllDivisible,
    /// Exactly one exceptional degree on one side, none on the other —
    /// impossible for any connected planar graph.
    ForbiddenOneException {
        degree: u64,
        /// True when the exception is a vertex degree.
        on_vertices: bool,
    },
    /// Exactly two exceptional degrees `u, v` on one side, none on the
    /// other; then `gcd(u, m) = gcd(v, m)` for that side's modulus `m`.
    TwoExceptions {
        u: u64,
        v: u64,
        modulus: u64,
        on_vertices: bool,
        gcds_equal: bool,
    },
    /// One exceptional face degree `u` and one exceptional vertex degree
    /// `v`; then `k / gcd(u, k) = l / gcd(v, l)`.
    MixedExceptions {
        face_degree: u64,
        vertex_degree: u64,
        ratios_equal: bool,
    },
    /// No hypothesis applies (three or more exceptions overall).
    NoPattern,
}

/// Result of [`check_graph_hypotheses`].
#[derive(Debug, Clone, Serialize)]
pub struct GraphReport {
    /// Datum of the bipartite subdivision, `(vertices, (2^E), faces)`.
    pub datum: BranchDatum,
    /// Moduli the map was tested against.
    pub k: u64,
    pub l: u64,
    pub pattern: GraphPattern,
    /// False only if the map violates a corollary — impossible for a map
    /// actually constructed from a rotation system, so a `false` signals
    /// an internal inconsistency.
    pub consistent: bool,
    /// For the forbidden single-exception pattern: the bad-pullback
    /// certificate showing the datum is non-realizable, which contradicts
    /// the map's existence.
    pub t1_certificate: Option<Certificate>,
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Evaluates the divisibility patterns of the planar-graph corollaries:
/// no connected planar graph has all face degrees divisible by `k` and
/// all vertex degrees but one divisible by `l`; with two vertex
/// exceptions `u, v`, necessarily `gcd(u,l) = gcd(v,l)`; with one face
/// exception `u` and one vertex exception `v`, necessarily
/// `k/gcd(u,k) = l/gcd(v,l)`. The same holds with vertices and faces
/// swapped (dual graph).
pub fn check_graph_hypotheses(
    map: &CombinatorialMap,
    k: u64,
    l: u64,
) -> Result<GraphReport, DessinError> {
    if k < 2 || l < 2 {
        return Err(DessinError::Syntax(format!(
            "moduli must be at least 2, got k={k} l={l}"
        )));
    }
    let datum = map.to_datum()?;
    let face_exc: Vec<u64> = map
        .face_degrees()
        .into_iter()
        .filter(|d| d % k != 0)
        .collect();
    let vert_exc: Vec<u64> = map
        .vertex_degrees()
        .into_iter()
        .filter(|d| d % l != 0)
        .collect();

    let mut t1_certificate = None;
    let (pattern, consistent) = match (face_exc.len(), vert_exc.len()) {
        (0, 0) => (GraphPattern::AllDivisible, true),
        (0, 1) | (1, 0) => {
            let on_vertices = face_exc.is_empty();
            let degree = if on_vertices { vert_exc[0] } else { face_exc[0] };
            // The corollary says this cannot happen; confirm the
            // contradiction by certifying the datum non-realizable.
            t1_certificate = check_t1_bad(&datum);
            (
                GraphPattern::ForbiddenOneException { degree, on_vertices },
                false,
            )
        }
        (0, 2) | (2, 0) => {
            let on_vertices = face_exc.is_empty();
            let (exc, modulus) = if on_vertices {
                (&vert_exc, l)
            } else {
                (&face_exc, k)
            };
            let (u, v) = (exc[0], exc[1]);
            let equal = gcd(u, modulus) == gcd(v, modulus);
            (
                GraphPattern::TwoExceptions {
                    u,
                    v,
                    modulus,
                    on_vertices,
                    gcds_equal: equal,
                },
                equal,
            )
        }
        (1, 1) => {
            let (u, v) = (face_exc[0], vert_exc[0]);
            let equal = k / gcd(u, k) == l / gcd(v, l);
            (
                GraphPattern::MixedExceptions {
                    face_degree: u,
                    vertex_degree: v,
                    ratios_equal: equal,
                },
                equal,
            )
        }
        _ => (GraphPattern::NoPattern, true),
    };
    Ok(GraphReport {
        datum,
        k,
        l,
        pattern,
        consistent,
        t1_certificate,
    })
}

/// Parses the text map format:
///
/// ```text
/// # comment
/// v: 1 2 3        # a vertex with darts 1,2,3 in counterclockwise order
/// e: 1 4          # an edge pairing darts 1 and 4
/// ```
///
/// Darts must be exactly `1..=2E`; the pairing must be a fixed-point-free
/// involution.
pub fn parse_map(text: &str) -> Result<CombinatorialMap, DessinError> {
    let mut rotations: Vec<Vec<usize>> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line.split_once(':').ok_or_else(|| {
            DessinError::Syntax(format!("line {}: expected 'v:' or 'e:'", lineno + 1))
        })?;
        let numbers: Result<Vec<usize>, _> = rest
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| {
                    DessinError::Syntax(format!("line {}: bad dart '{tok}'", lineno + 1))
                })
            })
            .collect();
        let numbers = numbers?;
        match tag.trim() {
            "v" => {
                if numbers.is_empty() {
                    return Err(DessinError::Syntax(format!(
                        "line {}: empty vertex rotation",
                        lineno + 1
                    )));
                }
                rotations.push(numbers);
            }
            "e" => {
                if numbers.len() != 2 {
                    return Err(DessinError::Syntax(format!(
                        "line {}: an edge needs exactly two darts",
                        lineno + 1
                    )));
                }
                edges.push((numbers[0], numbers[1]));
            }
            other => {
                return Err(DessinError::Syntax(format!(
                    "line {}: unknown tag '{other}'",
                    lineno + 1
                )));
            }
        }
    }
    if edges.is_empty() {
        return Err(DessinError::Syntax("no edges".into()));
    }
    CombinatorialMap::new(&rotations, &edges)
}

/// Renders a map in the text format accepted by [`parse_map`].
pub fn format_map(map: &CombinatorialMap) -> String {
    let mut out = String::new();
    let mut seen = vec![false; map.sigma.len()];
    for start in 0..map.sigma.len() {
        if seen[start] {
            continue;
        }
        out.push_str("v:");
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            out.push_str(&format!(" {}", d + 1));
            d = map.sigma[d];
        }
        out.push('\n');
    }
    for d in 0..map.sigma.len() {
        if d < map.alpha[d] {
            out.push_str(&format!("e: {} {}\n", d + 1, map.alpha[d] + 1));
        }
    }
    out
}

/// Calls `visit` on every connected genus-0 map with exactly `edges`
/// edges, enumerated as (canonical rotation per cycle type of `sigma`) ×
/// (all fixed-point-free involutions `alpha`).
///
/// Every isomorphism class appears at least once: relabeling darts brings
/// `sigma` to the canonical representative of its cycle type while `alpha`
/// remains a fixed-point-free involution, all of which are tried.
/// Duplicates within a class are possible and harmless.
pub fn for_each_genus0_map<F: FnMut(&CombinatorialMap)>(edges: usize, mut visit: F) {
    assert!(edges >= 1);
    let n = 2 * edges;
    let mut parts: Vec<u64> = Vec::new();
    enumerate_partitions(n as u64, n as u64, &mut parts, &mut |cycle_type| {
        let sigma = canonical_perm(n, cycle_type);
        let mut alpha = vec![usize::MAX; n];
        involutions(&mut alpha, &sigma, &mut visit);
    });
}

fn enumerate_partitions<F: FnMut(&[u64])>(
    remaining: u64,
    max_part: u64,
    acc: &mut Vec<u64>,
    visit: &mut F,
) {
    if remaining == 0 {
        visit(acc);
        return;
    }
    let mut part = max_part.min(remaining);
    while part >= 1 {
        acc.push(part);
        enumerate_partitions(remaining - part, part, acc, visit);
        acc.pop();
        part -= 1;
    }
}

fn canonical_perm(n: usize, cycle_type: &[u64]) -> Vec<usize> {
    let mut perm = vec![0usize; n];
    let mut next = 0usize;
    for &len in cycle_type {
        let len = len as usize;
        for i in 0..len {
            perm[next + i] = next + (i + 1) % len;
        }
        next += len;
    }
    perm
}

/// Recursively fills `alpha` with all fixed-point-free involutions,
/// visiting each completed connected genus-0 map.
fn involutions<F: FnMut(&CombinatorialMap)>(
    alpha: &mut Vec<usize>,
    sigma: &[usize],
    visit: &mut F,
) {
    let free = match alpha.iter().position(|&d| d == usize::MAX) {
        Some(d) => d,
        None => {
            if perms_connected(sigma, alpha) {
                let map = CombinatorialMap {
                    sigma: sigma.to_vec(),
                    alpha: alpha.clone(),
                };
                if map.genus() == 0 {
                    visit(&map);
                }
            }
            return;
        }
    };
    for partner in free + 1..alpha.len() {
        if alpha[partner] == usize::MAX {
            alpha[free] = partner;
            alpha[partner] = free;
            involutions(alpha, sigma, visit);
            alpha[free] = usize::MAX;
            alpha[partner] = usize::MAX;
        }
    }
}

/// All distinct data arising from connected genus-0 maps with up to
/// `max_edges` edges, with the maps that produced them.
pub fn genus0_datum_corpus(max_edges: usize) -> BTreeMap<String, (BranchDatum, CombinatorialMap)> {
    let mut corpus = BTreeMap::new();
    for edges in 1..=max_edges {
        for_each_genus0_map(edges, |map| {
            if let Ok(datum) = map.to_datum() {
                corpus
                    .entry(datum.to_string())
                    .or_insert_with(|| (datum, map.clone()));
            }
        });
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{find_constellation, SearchLimits, SearchOutcome};

    fn single_edge() -> CombinatorialMap {
        CombinatorialMap::new(&[vec![1], vec![2]], &[(1, 2)]).unwrap()
    }

    fn triangle() -> CombinatorialMap {
        CombinatorialMap::new(
            &[vec![1, 2], vec![3, 4], vec![5, 6]],
            &[(2, 3), (4, 5), (6, 1)],
        )
        .unwrap()
    }

    fn tetrahedron() -> CombinatorialMap {
        CombinatorialMap::new(
            &[
                vec![1, 2, 3],
                vec![4, 5, 6],
                vec![7, 8, 9],
                vec![10, 11, 12],
            ],
            &[(1, 4), (2, 7), (3, 10), (5, 12), (6, 8), (9, 11)],
        )
        .unwrap()
    }

    #[test]
    fn single_edge_faces() {
        let m = single_edge();
        assert_eq!(m.face_degrees(), vec![2]);
        assert_eq!(m.genus(), 0);
    }

    #[test]
    fn triangle_faces() {
        let m = triangle();
        assert_eq!(m.face_degrees(), vec![3, 3]);
        assert_eq!(m.vertex_degrees(), vec![2, 2, 2]);
        assert_eq!(m.genus(), 0);
    }

    #[test]
    fn tetrahedron_faces_and_euler() {
        let m = tetrahedron();
        assert_eq!(m.vertex_degrees(), vec![3, 3, 3, 3]);
        assert_eq!(m.face_degrees(), vec![3, 3, 3, 3]);
        assert_eq!(m.vertex_count() + m.face_count(), m.edge_count() + 2);
        assert_eq!(m.genus(), 0);
    }

    #[test]
    fn subdivision_doubles_edges_keeps_faces() {
        for m in [single_edge(), triangle(), tetrahedron()] {
            let b = m.subdivide_to_bipartite();
            assert_eq!(b.edge_count(), 2 * m.edge_count());
            assert_eq!(b.genus(), m.genus());
            // Bipartite convention: face degree = cycle length / 2.
            let halved: Vec<u64> = b.face_degrees().iter().map(|d| d / 2).collect();
            assert_eq!(halved, m.face_degrees());
            // Subdivision adds one degree-2 white vertex per original edge.
            let whites = b.vertex_degrees().iter().filter(|&&d| d == 2).count() as u64;
            let original_twos = m.vertex_degrees().iter().filter(|&&d| d == 2).count() as u64;
            assert_eq!(whites, m.edge_count() + original_twos);
        }
    }

    #[test]
    fn tetrahedron_datum() {
        let d = tetrahedron().to_datum().unwrap();
        assert_eq!(d.to_string(), "(3^4 | 3^4 | 2^6) n=12 g=0");
    }

    #[test]
    fn triangle_datum() {
        let d = triangle().to_datum().unwrap();
        assert_eq!(d.to_string(), "(3^2 | 2^3 | 2^3) n=6 g=0");
    }

    #[test]
    fn single_edge_datum_rejected() {
        assert!(matches!(
            single_edge().to_datum(),
            Err(DessinError::Datum(DatumError::TrivialPartition))
        ));
    }

    #[test]
    fn toroidal_map_rejected_by_datum() {
        // One vertex, two loops interleaved: sigma = (1 2 3 4), alpha = (1 3)(2 4).
        let m = CombinatorialMap::new(&[vec![1, 2, 3, 4]], &[(1, 3), (2, 4)]).unwrap();
        assert_eq!(m.genus(), 1);
        assert!(matches!(m.to_datum(), Err(DessinError::NonZeroGenus(1))));
    }

    #[test]
    fn loop_counts_twice() {
        // A vertex with a loop plus an edge to a second vertex.
        let m = CombinatorialMap::new(&[vec![1, 2, 3], vec![4]], &[(1, 2), (3, 4)]).unwrap();
        assert_eq!(m.vertex_degrees(), vec![3, 1]);
        assert_eq!(m.genus(), 0);
    }

    #[test]
    fn hypotheses_tetrahedron_allowed() {
        let report = check_graph_hypotheses(&tetrahedron(), 3, 3).unwrap();
        assert_eq!(report.pattern, GraphPattern::AllDivisible);
        assert!(report.consistent);
    }

    #[test]
    fn hypotheses_triangle_allowed() {
        let report = check_graph_hypotheses(&triangle(), 3, 2).unwrap();
        assert_eq!(report.pattern, GraphPattern::AllDivisible);
        assert!(report.consistent);
    }

    #[test]
    fn hypotheses_two_exceptions_gcds_match() {
        // Path with 3 vertices: degrees (1,2,1); faces: one face of degree 4.
        let m = CombinatorialMap::new(
            &[vec![1], vec![2, 3], vec![4]],
            &[(1, 2), (3, 4)],
        )
        .unwrap();
        assert_eq!(m.vertex_degrees(), vec![2, 1, 1]);
        assert_eq!(m.face_degrees(), vec![4]);
        let report = check_graph_hypotheses(&m, 2, 2).unwrap();
        match report.pattern {
            GraphPattern::TwoExceptions {
                u,
                v,
                on_vertices,
                gcds_equal,
                ..
            } => {
                assert_eq!((u, v), (1, 1));
                assert!(on_vertices);
                assert!(gcds_equal);
            }
            other => panic!("unexpected pattern {other:?}"),
        }
        assert!(report.consistent);
    }

    #[test]
    fn parse_round_trip() {
        let text = format_map(&tetrahedron());
        let parsed = parse_map(&text).unwrap();
        assert_eq!(parsed, tetrahedron());
    }

    #[test]
    fn parse_with_comments() {
        let m = parse_map("# triangle\nv: 1 2\nv: 3 4\nv: 5 6\n\ne: 2 3\ne: 4 5\ne: 6 1\n")
            .unwrap();
        assert_eq!(m, triangle());
    }

    #[test]
    fn parse_rejects_non_involutive_pairing() {
        let err = parse_map("v: 1 2\nv: 3 4\ne: 1 2\ne: 2 3\n").unwrap_err();
        assert!(matches!(err, DessinError::InvalidDarts(_)));
        let err = parse_map("v: 1 2\ne: 1 1\ne: 2 2\n").unwrap_err();
        assert!(matches!(err, DessinError::InvalidDarts(_)));
    }

    #[test]
    fn parse_rejects_disconnected() {
        let err = parse_map("v: 1 2\nv: 3 4\ne: 1 2\ne: 3 4\n").unwrap_err();
        assert!(matches!(err, DessinError::Disconnected));
    }

    #[test]
    fn small_corpus_all_realizable() {
        // Every connected genus-0 map with up to 4 edges induces a
        // realizable datum (when the datum is non-degenerate).
        let corpus = genus0_datum_corpus(4);
        assert!(!corpus.is_empty());
        for (datum, _) in corpus.values() {
            match find_constellation(datum, &SearchLimits::default()) {
                SearchOutcome::Found(c) => {
                    assert!(crate::oracle::verify_constellation(&c.perms, datum))
                }
                other => panic!("{datum} should be realizable, got {other:?}"),
            }
        }
    }

    #[test]
    fn corpus_satisfies_corollaries() {
        for (_, map) in genus0_datum_corpus(4).values() {
            for k in 2..=5 {
                for l in 2..=5 {
                    let report = check_graph_hypotheses(map, k, l).unwrap();
                    assert!(
                        report.consistent,
                        "map violates hypotheses at k={k} l={l}: {report:?}"
                    );
                }
            }
        }
    }
}
