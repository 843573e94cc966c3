//! Construction of non-realizable families and exhaustive enumeration of
//! branch data.

use thiserror::Error;

use crate::datum::{BranchDatum, DatumError, Partition};
use crate::orbifold::triple_invariants;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("triple ({0},{1},{2}) has non-positive Euler characteristic")]
    NonPositiveTriple(u64, u64, u64),
    #[error("triple (2,2,{0}) with odd {0} is excluded")]
    OddDihedral(u64),
    #[error("k must be at least 2, got {0}")]
    KTooSmall(u64),
    #[error("extras defect sum {d} exceeds k - 2 = {max}")]
    ExtrasTooLarge { d: u64, max: u64 },
    #[error("extra partition sums to {got}, expected {want}")]
    ExtraWrongSum { got: u64, want: u64 },
    #[error("unknown series {0:?}")]
    UnknownSeries(String),
    #[error("series {series}: parameter out of range: {reason}")]
    BadParams { series: String, reason: String },
    #[error("datum construction: {0}")]
    Datum(#[from] DatumError),
}

fn repeat_part(value: u64, count: u64) -> Vec<u64> {
    std::iter::repeat(value).take(count as usize).collect()
}

/// The Proposition 3.2 family: for a triple `(a,b,c)` with positive Euler
/// characteristic (excluding `(2,2,d)` with odd `d`) and `n = n(a,b,c)·k/2`,
/// the datum
///
/// `((a(k−d−1), a^{n/a−(k−d−1)}), (b^{n/b}), (c^{n/c}), extras…, n, 0)`
///
/// where `d` is the total defect of the extra partitions. For odd `k` the
/// result is non-realizable by the theta-degree divisibility criterion.
pub fn gen_prop_family(
    a: u64,
    b: u64,
    c: u64,
    k: u64,
    extras: &[Partition],
) -> Result<BranchDatum, GenError> {
    let inv = triple_invariants(a, b, c);
    let n_abc = match inv.n_abc {
        Some(n) if inv.chi > num_rational::Ratio::new(0, 1) => n,
        _ => return Err(GenError::NonPositiveTriple(a, b, c)),
    };
    let mut sorted = [a, b, c];
    sorted.sort_unstable();
    if sorted[0] == 2 && sorted[1] == 2 && sorted[2] % 2 == 1 {
        return Err(GenError::OddDihedral(sorted[2]));
    }
    if k < 2 {
        return Err(GenError::KTooSmall(k));
    }
    let n = n_abc / 2 * k;
    let d: u64 = extras.iter().map(|p| p.defect()).sum();
    if d > k - 2 {
        return Err(GenError::ExtrasTooLarge { d, max: k - 2 });
    }
    for p in extras {
        if p.n() != n {
            return Err(GenError::ExtraWrongSum { got: p.n(), want: n });
        }
    }
    let u1 = k - d - 1; // ≥ 1 since d ≤ k − 2
    let mut first = vec![a * u1];
    first.extend(repeat_part(a, n / a - u1));
    let mut partitions = vec![
        Partition::new(first)?,
        Partition::new(repeat_part(b, n / b))?,
        Partition::new(repeat_part(c, n / c))?,
    ];
    partitions.extend(extras.iter().cloned());
    Ok(BranchDatum::new(partitions, n, 0)?)
}

/// Named series from the non-realizability literature.
///
/// * `iz0(k, l)` → `((2^k),(2^k),(l,2k−l)), 2k, 0` for `l ≠ k`
/// * `such(l)` → `((2^{3l+3}),(3^{2l+2}),(5^{l+1},1,l)), 6(l+1), 0` for even `l ≥ 2`
/// * `thd(k)` → `((2^k),(2^{k−2},1,3),(k,k)), 2k, 0` for `k ≥ 2`
/// * `wbd(k)` → `((2^k,k+3),(3^{k+1}),(3^{k+1})), 3k+3, 1` for `k ≡ 1 (mod 4)`
/// * `koro(k)` → `((2^{3k+6}),(3^{2k+4}),(3,9,6^k)), 6k+12, 1` for odd `k`
///
/// The genus of each instance is recomputed from the partition sums.
pub fn gen_series(name: &str, params: &[u64]) -> Result<BranchDatum, GenError> {
    let bad = |reason: &str| GenError::BadParams {
        series: name.to_string(),
        reason: reason.to_string(),
    };
    let arity = |count: usize| -> Result<(), GenError> {
        if params.len() == count {
            Ok(())
        } else {
            Err(bad(&format!("expected {count} parameter(s)")))
        }
    };
    let partitions = match name {
        "iz0" => {
            arity(2)?;
            let (k, l) = (params[0], params[1]);
            if k < 2 || l == 0 || l >= 2 * k || l == k {
                return Err(bad("requires k ≥ 2, 0 < l < 2k, l ≠ k"));
            }
            vec![
                Partition::new(repeat_part(2, k))?,
                Partition::new(repeat_part(2, k))?,
                Partition::new(vec![l, 2 * k - l])?,
            ]
        }
        "such" => {
            arity(1)?;
            let l = params[0];
            if l < 2 || l % 2 != 0 {
                return Err(bad("requires even l ≥ 2"));
            }
            let mut third = repeat_part(5, l + 1);
            third.push(1);
            third.push(l);
            vec![
                Partition::new(repeat_part(2, 3 * l + 3))?,
                Partition::new(repeat_part(3, 2 * l + 2))?,
                Partition::new(third)?,
            ]
        }
        "thd" => {
            arity(1)?;
            let k = params[0];
            if k < 2 {
                return Err(bad("requires k ≥ 2"));
            }
            let mut second = repeat_part(2, k - 2);
            second.push(1);
            second.push(3);
            vec![
                Partition::new(repeat_part(2, k))?,
                Partition::new(second)?,
                Partition::new(vec![k, k])?,
            ]
        }
        "wbd" => {
            arity(1)?;
            let k = params[0];
            if k % 4 != 1 {
                return Err(bad("requires k ≡ 1 (mod 4)"));
            }
            let mut first = repeat_part(2, k);
            first.push(k + 3);
            vec![
                Partition::new(first)?,
                Partition::new(repeat_part(3, k + 1))?,
                Partition::new(repeat_part(3, k + 1))?,
            ]
        }
        "koro" => {
            arity(1)?;
            let k = params[0];
            if k % 2 != 1 {
                return Err(bad("requires odd k"));
            }
            let mut third = vec![3, 9];
            third.extend(repeat_part(6, k));
            vec![
                Partition::new(repeat_part(2, 3 * k + 6))?,
                Partition::new(repeat_part(3, 2 * k + 4))?,
                Partition::new(third)?,
            ]
        }
        other => return Err(GenError::UnknownSeries(other.to_string())),
    };
    Ok(BranchDatum::from_partitions(partitions)?)
}

/// Calls `visit` for every canonical branch datum with the given degree and
/// genus and at most `q_max` partitions, each exactly once, ordered by
/// ascending q and then descending-lexicographic partition lists.
pub fn for_each_datum<F: FnMut(BranchDatum)>(n: u64, g: u64, q_max: usize, mut visit: F) {
    if n == 1 {
        if g == 0 {
            visit(BranchDatum::new(vec![], 1, 0).unwrap());
        }
        return;
    }
    // total defect Σ(n − pᵢ) is fixed by the genus formula
    let total_defect = 2 * n - 2 + 2 * g;
    // all non-trivial partitions of n in canonical (descending) order
    let mut pool: Vec<Partition> = Vec::new();
    collect_partitions(n, n, &mut Vec::new(), &mut pool);
    pool.sort_unstable_by(|a, b| b.cmp(a));

    let q_hi = (total_defect as usize).min(q_max);
    for q in 2..=q_hi {
        let mut chosen: Vec<Partition> = Vec::new();
        pick(&pool, 0, q, total_defect, n, g, &mut chosen, &mut visit);
    }
}

fn collect_partitions(remaining: u64, max_part: u64, current: &mut Vec<u64>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        let p = Partition::new(current.clone()).unwrap();
        if !p.is_trivial() {
            out.push(p);
        }
        return;
    }
    let mut part = max_part.min(remaining);
    while part >= 1 {
        current.push(part);
        collect_partitions(remaining - part, part, current, out);
        current.pop();
        part -= 1;
    }
}

#[allow(clippy::too_many_arguments)]
fn pick<F: FnMut(BranchDatum)>(
    pool: &[Partition],
    from: usize,
    slots: usize,
    defect: u64,
    n: u64,
    g: u64,
    chosen: &mut Vec<Partition>,
    visit: &mut F,
) {
    if slots == 0 {
        if defect == 0 {
            visit(BranchDatum::new(chosen.clone(), n, g).unwrap());
        }
        return;
    }
    for i in from..pool.len() {
        let d = pool[i].defect();
        // each remaining slot needs defect ≥ 1; later picks have d' ≤ d
        // each remaining slot needs defect ≥ 1
        if d > defect - (slots as u64 - 1) {
            continue;
        }
        chosen.push(pool[i].clone());
        pick(pool, i, slots - 1, defect - d, n, g, chosen, visit);
        chosen.pop();
    }
}

/// Collects [`for_each_datum`] into a vector.
pub fn enumerate_data(n: u64, g: u64, q_max: usize) -> Vec<BranchDatum> {
    let mut out = Vec::new();
    for_each_datum(n, g, q_max, |d| out.push(d));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn prop_family_233_k3() {
        let d = gen_prop_family(2, 3, 3, 3, &[]).unwrap();
        assert_eq!(d, "(4,2^7 | 3^6 | 3^6)".parse().unwrap());
    }

    #[test]
    fn prop_family_235_k3() {
        let d = gen_prop_family(2, 3, 5, 3, &[]).unwrap();
        assert_eq!(d, "(4,2^43 | 3^30 | 5^18) n=90 g=0".parse().unwrap());
    }

    #[test]
    fn prop_family_with_extras() {
        let extra = Partition::new(
            std::iter::once(2).chain(std::iter::repeat(1).take(16)).collect(),
        )
        .unwrap();
        let d = gen_prop_family(2, 3, 3, 3, &[extra]).unwrap();
        assert_eq!(d, "(2^9 | 3^6 | 3^6 | 2,1^16)".parse().unwrap());
    }

    #[test]
    fn prop_family_rejects_odd_dihedral() {
        assert_eq!(
            gen_prop_family(2, 2, 5, 3, &[]),
            Err(GenError::OddDihedral(5))
        );
    }

    #[test]
    fn prop_family_rejects_large_extras() {
        let extra = Partition::new(vec![4, 2, 2, 2, 2, 2, 2, 1, 1]).unwrap();
        assert!(matches!(
            gen_prop_family(2, 3, 3, 3, &[extra]),
            Err(GenError::ExtrasTooLarge { .. })
        ));
    }

    #[test]
    fn series_instances() {
        assert_eq!(
            gen_series("iz0", &[3, 2]).unwrap(),
            "(2^3 | 2^3 | 2,4)".parse().unwrap()
        );
        assert_eq!(
            gen_series("thd", &[4]).unwrap(),
            "(2^4 | 2^2,1,3 | 4,4)".parse().unwrap()
        );
        assert_eq!(
            gen_series("such", &[4]).unwrap(),
            "(2^15 | 3^10 | 5^5,1,4)".parse().unwrap()
        );
        let wbd = gen_series("wbd", &[1]).unwrap();
        assert_eq!(wbd, "(2,4 | 3,3 | 3,3) g=1".parse().unwrap());
        assert_eq!(wbd.genus(), 1);
        let koro = gen_series("koro", &[1]).unwrap();
        assert_eq!(koro, "(2^9 | 3^6 | 3,9,6) g=1".parse().unwrap());
        assert_eq!(koro.genus(), 1);
    }

    #[test]
    fn series_thd_k2_is_the_introductory_example() {
        assert_eq!(
            gen_series("thd", &[2]).unwrap(),
            "(2,2 | 2,2 | 1,3)".parse().unwrap()
        );
    }

    #[test]
    fn series_rejects_out_of_range() {
        assert!(gen_series("iz0", &[3, 3]).is_err());
        assert!(gen_series("wbd", &[2]).is_err());
        assert!(gen_series("koro", &[2]).is_err());
        assert!(gen_series("nope", &[1]).is_err());
    }

    #[test]
    fn enumerate_small_degrees() {
        assert_eq!(
            enumerate_data(2, 0, usize::MAX),
            vec!["(2 | 2)".parse().unwrap()]
        );
        let three = enumerate_data(3, 0, usize::MAX);
        assert_eq!(
            three,
            vec![
                "(3 | 3)".parse().unwrap(),
                "(3 | 2,1 | 2,1)".parse().unwrap(),
                "(2,1 | 2,1 | 2,1 | 2,1)".parse().unwrap(),
            ]
        );
    }

    #[test]
    fn enumerate_matches_naive_recount() {
        // independent recomputation: filter all multisets of partitions
        for n in 2..=6u64 {
            let fast: BTreeSet<BranchDatum> = enumerate_data(n, 0, usize::MAX).into_iter().collect();
            let naive = naive_enumerate(n, 0);
            assert_eq!(fast, naive, "n={n}");
            assert_eq!(fast.len(), enumerate_data(n, 0, usize::MAX).len(), "duplicates at n={n}");
        }
    }

    #[test]
    fn enumerate_respects_q_max() {
        let all = enumerate_data(6, 0, usize::MAX);
        let capped = enumerate_data(6, 0, 3);
        assert!(capped.len() < all.len());
        assert!(capped.iter().all(|d| d.q() <= 3));
        assert!(all.iter().filter(|d| d.q() <= 3).count() == capped.len());
    }

    #[test]
    fn enumerate_genus_one() {
        let data = enumerate_data(2, 1, usize::MAX);
        assert_eq!(data, vec!["(2 | 2 | 2 | 2) g=1".parse().unwrap()]);
    }

    fn naive_enumerate(n: u64, g: u64) -> BTreeSet<BranchDatum> {
        let mut pool: Vec<Partition> = Vec::new();
        collect_partitions(n, n, &mut Vec::new(), &mut pool);
        let mut out = BTreeSet::new();
        // multisets up to size 2n: brute force with repetition
        fn rec(
            pool: &[Partition],
            from: usize,
            chosen: &mut Vec<Partition>,
            n: u64,
            g: u64,
            out: &mut BTreeSet<BranchDatum>,
        ) {
            if chosen.len() >= 2 {
                if let Ok(d) = BranchDatum::new(chosen.clone(), n, g) {
                    out.insert(d);
                }
            }
            if chosen.len() >= 2 * n as usize {
                return;
            }
            for i in from..pool.len() {
                chosen.push(pool[i].clone());
                rec(pool, i, chosen, n, g, out);
                chosen.pop();
            }
        }
        rec(&pool, 0, &mut Vec::new(), n, g, &mut out);
        out
    }
}
