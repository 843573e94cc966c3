//! Partitions, branch data, the canonical text grammar and the
//! Riemann–Hurwitz constraint.
//!
//! A branch datum is a collection `(Π₁, …, Π_q, n, g)` of non-trivial
//! partitions of `n` satisfying
//!
//! ```text
//! Σ pᵢ = (q − 2)·n + 2 − 2g
//! ```
//!
//! where `pᵢ` is the number of parts of `Πᵢ`. Data are unordered collections
//! of partitions; a fixed total order (descending lexicographic on the
//! descending-sorted parts) defines the canonical form used for equality,
//! hashing and cache keys.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DatumError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("partition part must be positive")]
    ZeroPart,
    #[error("trivial partition (all parts 1) is not allowed in a branch datum")]
    TrivialPartition,
    #[error("partitions have inconsistent sums: {0} vs {1}")]
    InconsistentSums(u64, u64),
    #[error("declared n={declared} does not match part sums {actual}")]
    WrongN { declared: u64, actual: u64 },
    #[error("declared g={declared} but Riemann-Hurwitz forces g={actual}")]
    WrongGenus { declared: i64, actual: i64 },
    #[error("Riemann-Hurwitz gives non-integral or negative genus ({0}/2): not a branch datum")]
    BadGenus(i64),
    #[error("empty datum requires an explicit n=1")]
    EmptyDatum,
}

/// A partition of a positive integer, parts stored sorted descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    pub fn new(mut parts: Vec<u64>) -> Result<Self, DatumError> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(DatumError::ZeroPart);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    /// Parts in descending order.
    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// The number being partitioned.
    pub fn n(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All parts equal to one.
    pub fn is_trivial(&self) -> bool {
        self.parts.iter().all(|&p| p == 1)
    }

    /// The defect `d(Π) = n − p`.
    pub fn defect(&self) -> u64 {
        self.n() - self.len() as u64
    }
}

impl fmt::Display for Partition {
    /// Prints parts descending with exponent grouping, e.g. `4,2^7`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.parts.len() {
            let v = self.parts[i];
            let mut j = i;
            while j < self.parts.len() && self.parts[j] == v {
                j += 1;
            }
            if !first {
                write!(f, ",")?;
            }
            first = false;
            if j - i == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{}", j - i)?;
            }
            i = j;
        }
        Ok(())
    }
}

/// Returns the genus forced by the Riemann–Hurwitz relation, or an error
/// when the forced value is negative or non-integral.
///
/// All partitions must share the same sum `n`. The empty list is the `q = 0`
/// datum of the identity (`n = 1`, `g = 0`).
pub fn rh_genus(partitions: &[Partition]) -> Result<u64, DatumError> {
    if partitions.is_empty() {
        return Ok(0);
    }
    let n = partitions[0].n();
    for p in partitions {
        if p.n() != n {
            return Err(DatumError::InconsistentSums(n, p.n()));
        }
    }
    let q = partitions.len() as i64;
    let sum_p: i64 = partitions.iter().map(|p| p.len() as i64).sum();
    let twice_g = (q - 2) * n as i64 + 2 - sum_p;
    if twice_g < 0 || twice_g % 2 != 0 {
        return Err(DatumError::BadGenus(twice_g));
    }
    Ok((twice_g / 2) as u64)
}

/// A branch datum `(Π₁, …, Π_q, n, g)` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BranchDatum {
    partitions: Vec<Partition>,
    n: u64,
    g: u64,
}

impl BranchDatum {
    /// Builds a datum, validating every invariant: equal sums, no trivial
    /// partitions, the Riemann–Hurwitz relation. Canonicalizes the partition
    /// order.
    pub fn new(mut partitions: Vec<Partition>, n: u64, g: u64) -> Result<Self, DatumError> {
        if partitions.is_empty() {
            if n != 1 || g != 0 {
                return Err(DatumError::EmptyDatum);
            }
            return Ok(BranchDatum {
                partitions,
                n: 1,
                g: 0,
            });
        }
        for p in &partitions {
            if p.is_trivial() {
                return Err(DatumError::TrivialPartition);
            }
            if p.n() != n {
                return Err(DatumError::WrongN {
                    declared: n,
                    actual: p.n(),
                });
            }
        }
        let forced = rh_genus(&partitions)?;
        if forced != g {
            return Err(DatumError::WrongGenus {
                declared: g as i64,
                actual: forced as i64,
            });
        }
        // canonical order: descending lexicographic on descending-sorted parts
        partitions.sort_unstable_by(|a, b| b.cmp(a));
        Ok(BranchDatum { partitions, n, g })
    }

    /// Builds a datum inferring `n` from part sums and `g` from
    /// Riemann–Hurwitz.
    pub fn from_partitions(partitions: Vec<Partition>) -> Result<Self, DatumError> {
        let n = partitions.first().map(|p| p.n()).unwrap_or(1);
        // validate the partitions before the genus computation so the error
        // names the actual defect
        for p in &partitions {
            if p.is_trivial() {
                return Err(DatumError::TrivialPartition);
            }
            if p.n() != n {
                return Err(DatumError::WrongN {
                    declared: n,
                    actual: p.n(),
                });
            }
        }
        let g = rh_genus(&partitions)?;
        BranchDatum::new(partitions, n, g)
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn genus(&self) -> u64 {
        self.g
    }

    pub fn q(&self) -> usize {
        self.partitions.len()
    }

    /// Canonical text form, round-trips through [`FromStr`].
    pub fn canonical_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BranchDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.partitions.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ") n={} g={}", self.n, self.g)
    }
}

impl FromStr for BranchDatum {
    type Err = DatumError;

    /// Grammar:
    ///
    /// ```text
    /// datum     := "(" partition ("|" partition)* ")" [ "n=" INT ] [ "g=" INT ]
    /// partition := entry ("," entry)*
    /// entry     := INT | INT "^" INT
    /// ```
    ///
    /// Whitespace is insignificant. `n` and `g`, when present, must agree
    /// with the part sums and the Riemann–Hurwitz relation.
    fn from_str(text: &str) -> Result<Self, DatumError> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let open = s
            .find('(')
            .ok_or_else(|| DatumError::Syntax("missing '('".into()))?;
        if !s[..open].is_empty() {
            return Err(DatumError::Syntax("unexpected text before '('".into()));
        }
        let close = s
            .rfind(')')
            .ok_or_else(|| DatumError::Syntax("missing ')'".into()))?;
        let body = &s[open + 1..close];
        let mut trailer = &s[close + 1..];

        let mut partitions = Vec::new();
        if !body.is_empty() {
            for part_text in body.split('|') {
                let mut parts = Vec::new();
                for entry in part_text.split(',') {
                    let (base, count) = match entry.split_once('^') {
                        Some((b, e)) => {
                            let b: u64 = b
                                .parse()
                                .map_err(|_| DatumError::Syntax(format!("bad entry '{entry}'")))?;
                            let e: u64 = e
                                .parse()
                                .map_err(|_| DatumError::Syntax(format!("bad entry '{entry}'")))?;
                            (b, e)
                        }
                        None => (
                            entry
                                .parse()
                                .map_err(|_| DatumError::Syntax(format!("bad entry '{entry}'")))?,
                            1,
                        ),
                    };
                    if count == 0 {
                        return Err(DatumError::Syntax(format!("zero exponent in '{entry}'")));
                    }
                    for _ in 0..count {
                        parts.push(base);
                    }
                }
                partitions.push(Partition::new(parts)?);
            }
        }

        let mut declared_n = None;
        let mut declared_g = None;
        while !trailer.is_empty() {
            if let Some(rest) = trailer.strip_prefix("n=") {
                let end = rest
                    .find(|c: char| !c.is_ascii_digit())
                    .unwrap_or(rest.len());
                if end == 0 {
                    return Err(DatumError::Syntax("expected integer after n=".into()));
                }
                declared_n = Some(rest[..end].parse::<u64>().unwrap());
                trailer = &rest[end..];
            } else if let Some(rest) = trailer.strip_prefix("g=") {
                let end = rest
                    .find(|c: char| !c.is_ascii_digit())
                    .unwrap_or(rest.len());
                if end == 0 {
                    return Err(DatumError::Syntax("expected integer after g=".into()));
                }
                declared_g = Some(rest[..end].parse::<u64>().unwrap());
                trailer = &rest[end..];
            } else {
                return Err(DatumError::Syntax(format!("unexpected trailer '{trailer}'")));
            }
        }

        let n = match (partitions.first(), declared_n) {
            (Some(p), Some(dn)) => {
                if p.n() != dn {
                    return Err(DatumError::WrongN {
                        declared: dn,
                        actual: p.n(),
                    });
                }
                dn
            }
            (Some(p), None) => p.n(),
            (None, Some(dn)) => dn,
            (None, None) => return Err(DatumError::EmptyDatum),
        };
        if partitions.iter().any(|p| p.is_trivial()) {
            return Err(DatumError::TrivialPartition);
        }
        let g = match declared_g {
            Some(dg) => dg,
            None => rh_genus(&partitions)?,
        };
        BranchDatum::new(partitions, n, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(parts: &[u64]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn parse_published_datum() {
        let d: BranchDatum = "(2^7,4 | 3^6 | 3^6)".parse().unwrap();
        assert_eq!(d.n(), 18);
        assert_eq!(d.genus(), 0);
        assert_eq!(d.q(), 3);
        assert_eq!(d.partitions()[0].parts(), &[4, 2, 2, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn parse_power_map_datum() {
        let d: BranchDatum = "(5 | 5)".parse().unwrap();
        assert_eq!(d.n(), 5);
        assert_eq!(d.genus(), 0);
    }

    #[test]
    fn parse_rejects_wrong_genus() {
        let err = "(2,2 | 2,2 | 1,3) g=1".parse::<BranchDatum>().unwrap_err();
        assert!(matches!(err, DatumError::WrongGenus { .. }));
    }

    #[test]
    fn parse_rejects_trivial_partition() {
        assert!(matches!(
            "(2,2 | 1,1,1,1)".parse::<BranchDatum>(),
            Err(DatumError::TrivialPartition)
        ));
    }

    #[test]
    fn parse_rejects_inconsistent_sums() {
        assert!("(2,2 | 3,2)".parse::<BranchDatum>().is_err());
    }

    #[test]
    fn rh_genus_examples() {
        assert_eq!(
            rh_genus(&[part(&[2, 2]), part(&[2, 2]), part(&[1, 3])]).unwrap(),
            0
        );
        for n in 1..=12u64 {
            assert_eq!(rh_genus(&[part(&[n]), part(&[n])]).unwrap(), 0);
        }
        assert_eq!(
            rh_genus(&[part(&[2, 4]), part(&[3, 3]), part(&[3, 3])]).unwrap(),
            1
        );
    }

    #[test]
    fn rh_genus_rejects_q1() {
        assert!(rh_genus(&[part(&[2, 1])]).is_err());
    }

    #[test]
    fn defect_examples() {
        let mut p = vec![2u64];
        p.extend(std::iter::repeat(1).take(16));
        assert_eq!(part(&p).defect(), 1);
        assert_eq!(part(&[1, 1, 1, 1]).defect(), 0);
        for k in 1..=10u64 {
            assert_eq!(part(&[k, k]).defect(), 2 * k - 2);
        }
    }

    #[test]
    fn format_canonicalizes() {
        let d: BranchDatum = "(3^6 | 2^7,4 | 3^6)".parse().unwrap();
        assert_eq!(d.to_string(), "(4,2^7 | 3^6 | 3^6) n=18 g=0");
    }

    #[test]
    fn format_parse_round_trip() {
        for s in [
            "(4,2^7 | 3^6 | 3^6) n=18 g=0",
            "(5 | 5) n=5 g=0",
            "(3,1 | 2^2 | 2^2) n=4 g=0",
            "(4,2 | 3^2 | 3^2) n=6 g=1",
        ] {
            let d: BranchDatum = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
            let d2: BranchDatum = d.to_string().parse().unwrap();
            assert_eq!(d, d2);
        }
    }

    #[test]
    fn empty_datum_needs_n1() {
        let d = BranchDatum::new(vec![], 1, 0).unwrap();
        assert_eq!(d.q(), 0);
        assert!(BranchDatum::new(vec![], 2, 0).is_err());
    }
}
