//! Exhaustive monotonicity/submodularity checking and super-block eviction.

use serde::Serialize;

use crate::error::{input_err, Result, SmkpError};
use crate::numeric::leq;
use crate::oracle::SetFunction;

/// Hard ceiling on the ground set handled by [`check_submodular_monotone`].
pub const CHECK_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ViolationKind {
    /// `f(S ∪ {i}) < f(S)`.
    Monotonicity,
    /// `f(S ∪ {i}) - f(S) < f(S ∪ {i, j}) - f(S ∪ {j})`.
    Submodularity,
    /// `f(S) < 0`.
    Negativity,
}

/// First failing triple `(S, i, j)` found by the exhaustive scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub set: Vec<usize>,
    pub item: usize,
    /// Second item for submodularity violations.
    pub other: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub ground_size: usize,
    pub sets_evaluated: usize,
    pub violation: Option<Violation>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn members(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Verify non-negativity, monotonicity and submodularity over every subset.
///
/// Submodularity is checked in its diminishing-returns form, which is equivalent to the lattice
/// inequality `f(S) + f(T) >= f(S ∪ T) + f(S ∩ T)` and needs only `O(2^n n^2)` comparisons.
pub fn check_submodular_monotone<F: SetFunction + ?Sized>(
    f: &F,
    max_ground: usize,
) -> Result<CheckReport> {
    let n = f.ground_size();
    if max_ground > CHECK_LIMIT {
        return Err(SmkpError::Size(format!("max_ground {max_ground} exceeds {CHECK_LIMIT}")));
    }
    if n > max_ground {
        return Err(SmkpError::Size(format!("ground set of {n} items exceeds max_ground {max_ground}")));
    }
    let table: Vec<f64> = (0..1usize << n).map(|mask| f.value(&members(mask, n))).collect();
    let mut report = CheckReport { ground_size: n, sets_evaluated: table.len(), violation: None };
    for mask in 0..table.len() {
        if table[mask] < 0.0 {
            report.violation = Some(Violation {
                kind: ViolationKind::Negativity,
                set: members(mask, n),
                item: 0,
                other: None,
                lhs: table[mask],
                rhs: 0.0,
            });
            return Ok(report);
        }
        for i in (0..n).filter(|i| mask >> i & 1 == 0) {
            let gain_i = table[mask | 1 << i] - table[mask];
            if !leq(table[mask], table[mask | 1 << i]) {
                report.violation = Some(Violation {
                    kind: ViolationKind::Monotonicity,
                    set: members(mask, n),
                    item: i,
                    other: None,
                    lhs: table[mask | 1 << i],
                    rhs: table[mask],
                });
                return Ok(report);
            }
            for j in (i + 1..n).filter(|j| mask >> j & 1 == 0) {
                let with_j = mask | 1 << j;
                let later = table[with_j | 1 << i] - table[with_j];
                if !leq(later, gain_i) {
                    report.violation = Some(Violation {
                        kind: ViolationKind::Submodularity,
                        set: members(mask, n),
                        item: i,
                        other: Some(j),
                        lhs: gain_i,
                        rhs: later,
                    });
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

/// Pick the part whose removal loses the least, following the prefix-marginal argument:
/// returns the 0-based index `r*` minimising
/// `h(S_1 ∪ … ∪ S_{r*}) - h(S_1 ∪ … ∪ S_{r*-1})` in the given order (first minimum wins).
///
/// For submodular `h` with `h(∅) >= 0` and disjoint parts this guarantees
/// `h(∪_{r ≠ r*} S_r) >= (1 - 1/N) · h(∪_r S_r)`.
pub fn evict_superblock<F: SetFunction + ?Sized>(h: &F, parts: &[Vec<usize>]) -> Result<usize> {
    if parts.is_empty() {
        return input_err("evict_superblock needs at least one part");
    }
    let n = h.ground_size();
    let mut owner = vec![usize::MAX; n];
    for (r, part) in parts.iter().enumerate() {
        for &i in part {
            if i >= n {
                return input_err(format!("part {r} references unknown item {i}"));
            }
            if owner[i] != usize::MAX && owner[i] != r {
                return input_err(format!("parts {} and {r} overlap on item {i}", owner[i]));
            }
            owner[i] = r;
        }
    }
    let mut prefix: Vec<usize> = Vec::new();
    let mut prev = h.value(&prefix);
    let mut best = (0, f64::INFINITY);
    for (r, part) in parts.iter().enumerate() {
        prefix.extend_from_slice(part);
        let cur = h.value(&prefix);
        let gain = cur - prev;
        if gain < best.1 {
            best = (r, gain);
        }
        prev = cur;
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ObjectiveOracle;

    struct Table(Vec<f64>, usize);

    impl SetFunction for Table {
        fn ground_size(&self) -> usize {
            self.1
        }
        fn value(&self, set: &[usize]) -> f64 {
            let mask = set.iter().fold(0usize, |m, &i| m | 1 << i);
            self.0[mask]
        }
    }

    #[test]
    fn modular_passes() {
        let f = ObjectiveOracle::modular(vec![1.0, 2.0, 0.0, 4.0]).unwrap();
        let rep = check_submodular_monotone(&f, 10).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.sets_evaluated, 16);
    }

    #[test]
    fn supermodular_is_caught() {
        // f = |S|^2 on two items: gains grow.
        let f = Table(vec![0.0, 1.0, 1.0, 4.0], 2);
        let rep = check_submodular_monotone(&f, 4).unwrap();
        let v = rep.violation.unwrap();
        assert_eq!(v.kind, ViolationKind::Submodularity);
        assert_eq!((v.set.clone(), v.item, v.other), (vec![], 0, Some(1)));
    }

    #[test]
    fn non_monotone_is_caught() {
        let f = Table(vec![0.0, 2.0, 1.0, 1.0], 2);
        let v = check_submodular_monotone(&f, 4).unwrap().violation.unwrap();
        assert_eq!(v.kind, ViolationKind::Monotonicity);
    }

    #[test]
    fn size_limits() {
        let f = ObjectiveOracle::modular(vec![1.0; 5]).unwrap();
        assert!(matches!(check_submodular_monotone(&f, 4), Err(SmkpError::Size(_))));
        assert!(matches!(check_submodular_monotone(&f, 13), Err(SmkpError::Size(_))));
    }

    #[test]
    fn evict_drops_smallest_marginal() {
        let h = ObjectiveOracle::modular(vec![1.0; 4]).unwrap();
        let r = evict_superblock(&h, &[vec![0, 1, 2], vec![3]]).unwrap();
        assert_eq!(r, 1);
        let rest = h.value(&[0, 1, 2]);
        assert!(rest >= 0.5 * 4.0);
    }

    #[test]
    fn evict_single_part() {
        let h = ObjectiveOracle::modular(vec![1.0; 2]).unwrap();
        assert_eq!(evict_superblock(&h, &[vec![0, 1]]).unwrap(), 0);
    }

    #[test]
    fn evict_rejects_overlap() {
        let h = ObjectiveOracle::modular(vec![1.0; 3]).unwrap();
        assert!(evict_superblock(&h, &[vec![0, 1], vec![1, 2]]).is_err());
    }
}
