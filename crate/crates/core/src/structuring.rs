//! Grouping bins into an N-leveled block partition, and the assignment transform that moves
//! any feasible packing onto the leveled bins while losing at most a `1/N` fraction of value.
//!
//! Bins are sorted by capacity (descending, ties by id) and addressed by their *position* in
//! that order. Block `j` holds `N^⌊j/N²⌋` consecutive positions; each group of `N²` blocks is a
//! level and each run of `N` blocks inside a level is a super-block.

use std::ops::Range;

use serde::Serialize;

use crate::checks::evict_superblock;
use crate::error::{input_err, Result};
use crate::instance::{check_feasible, Assignment, SmkpInstance};
use crate::oracle::{ResidualOracle, SetFunction};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeveledStructure {
    /// Leveling base `N >= 2`.
    pub n: usize,
    /// Original bin index at each sorted position (all bins, surviving ones first).
    pub order: Vec<usize>,
    /// Position ranges of blocks `0..=k`.
    pub blocks: Vec<Range<usize>>,
    /// Reduced capacity of each surviving position (minimum over its block).
    pub reduced: Vec<f64>,
}

/// `N^e`, saturating at `usize::MAX`.
fn pow_sat(n: usize, e: usize) -> usize {
    let mut acc: usize = 1;
    for _ in 0..e {
        acc = acc.saturating_mul(n);
        if acc == usize::MAX {
            break;
        }
    }
    acc
}

impl LeveledStructure {
    /// Index of the last block.
    pub fn k(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn level_of(&self, block: usize) -> usize {
        block / self.n.saturating_mul(self.n)
    }

    /// `N^⌊j/N²⌋`.
    pub fn block_size(&self, block: usize) -> usize {
        pow_sat(self.n, self.level_of(block))
    }

    /// Number of surviving bins `|B̃|`.
    pub fn surviving_count(&self) -> usize {
        self.reduced.len()
    }

    /// Original indices of the surviving bins, in position order.
    pub fn surviving_bins(&self) -> &[usize] {
        &self.order[..self.surviving_count()]
    }

    /// Original indices of the bins dropped past the last full block.
    pub fn discarded_bins(&self) -> &[usize] {
        &self.order[self.surviving_count()..]
    }

    /// Block index of a surviving position.
    pub fn block_of_position(&self, pos: usize) -> usize {
        self.blocks.partition_point(|r| r.end <= pos)
    }

    /// Reduced capacity per original bin index; `None` for discarded bins.
    pub fn leveled_capacities(&self) -> Vec<Option<f64>> {
        let mut caps = vec![None; self.order.len()];
        for (pos, &b) in self.surviving_bins().iter().enumerate() {
            caps[b] = Some(self.reduced[pos]);
        }
        caps
    }
}

/// Sort bins by capacity and cut them into N-leveled blocks, discarding the partial tail.
///
/// `k` is the largest index with `Σ_{r=0}^{k} N^⌊r/N²⌋ <= m`; capacities inside each block are
/// lowered to the block minimum.
pub fn structure_in_blocks<S: AsRef<str>>(
    capacities: &[f64],
    ids: &[S],
    n: usize,
) -> Result<LeveledStructure> {
    if n < 2 {
        return input_err(format!("leveling base N must be at least 2, got {n}"));
    }
    let m = capacities.len();
    if m == 0 {
        return input_err("structure_in_blocks needs at least one bin");
    }
    if ids.len() != m {
        return input_err("one id per bin is required");
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        capacities[b]
            .total_cmp(&capacities[a])
            .then_with(|| ids[a].as_ref().cmp(ids[b].as_ref()))
    });
    let mut blocks = Vec::new();
    let mut used = 0usize;
    loop {
        let size = pow_sat(n, blocks.len() / n.saturating_mul(n));
        if size > m - used {
            break;
        }
        blocks.push(used..used + size);
        used += size;
    }
    let mut reduced = Vec::with_capacity(used);
    for r in &blocks {
        let min = order[r.clone()].iter().map(|&b| capacities[b]).fold(f64::INFINITY, f64::min);
        reduced.extend(std::iter::repeat_n(min, r.len()));
    }
    Ok(LeveledStructure { n, order, blocks, reduced })
}

/// Move a feasible, pairwise-disjoint assignment onto the leveled bins.
///
/// The output is feasible for the reduced capacities, uses only items of the input, and keeps
/// at least `(1 - 1/N)` of its value. Steps, with `ℓ = ⌊(k+1)/N²⌋` and the tail of discarded
/// bins treated as block `k+1`:
///
/// * evict: pick the super-block index `r*` whose removal (across all levels below `ℓ`) loses
///   least, measured on `Q ↦ f(Q ∪ R)` with `R` the items of level `ℓ`, and empty it;
/// * shuffle: move the contents of the last super-block of each level into super-block `r*`
///   (i-th bin to i-th bin), leaving the last super-blocks empty;
/// * shift: the first block of level `t+1` moves into the empty last super-block of level `t`,
///   every other block above level 0 moves one block back, and the first `N² - N` bins stay.
pub fn transform_assignment<F: SetFunction>(
    instance: &SmkpInstance<F>,
    leveled: &LeveledStructure,
    assignment: &Assignment,
) -> Result<Assignment> {
    let m = instance.bin_count();
    if leveled.order.len() != m {
        return input_err("leveled structure was built for a different bin set");
    }
    let verdict = check_feasible(instance, assignment)?;
    if !verdict.feasible {
        return input_err("transform_assignment needs a feasible assignment");
    }
    if assignment.union().len() != assignment.placements() {
        return input_err("transform_assignment needs pairwise disjoint bins (dedup first)");
    }

    let n = leveled.n;
    let nn = n.saturating_mul(n);
    let k = leveled.k();
    let level = (k + 1) / nn;
    // Contents by position.
    let mut t: Vec<Vec<usize>> = leveled.order.iter().map(|&b| assignment.bin(b).to_vec()).collect();
    if level == 0 {
        return Ok(to_assignment(leveled, &t));
    }

    // Block ranges including the discarded tail as block k+1.
    let mut ranges = leveled.blocks.clone();
    ranges.push(leveled.surviving_count()..m);
    let super_block = |lvl: usize, r: usize| -> Range<usize> {
        let first = lvl * nn + r * n;
        ranges[first].start..ranges[first + n - 1].end
    };

    let last_level_start = ranges[level * nn].start;
    let tail: Vec<usize> = t[last_level_start..].iter().flatten().copied().collect();
    let parts: Vec<Vec<usize>> = (0..n)
        .map(|r| (0..level).flat_map(|lvl| super_block(lvl, r)).flat_map(|p| t[p].clone()).collect())
        .collect();
    let h = ResidualOracle::over_all_items(&instance.objective, tail)?;
    let r_star = evict_superblock(&h, &parts)?;

    for lvl in 0..level {
        let evicted = super_block(lvl, r_star);
        for p in evicted.clone() {
            t[p].clear();
        }
        if r_star != n - 1 {
            let last = super_block(lvl, n - 1);
            for (dst, src) in evicted.zip(last) {
                t[dst] = std::mem::take(&mut t[src]);
            }
        }
    }

    let take = |p: usize| -> Vec<usize> { t.get(p).cloned().unwrap_or_default() };
    let mut shifted = Vec::with_capacity(leveled.surviving_count());
    for pos in 0..leveled.surviving_count() {
        let j = leveled.block_of_position(pos);
        let lvl = j / nn;
        let content = if lvl < level && (j - lvl * nn) / n == n - 1 {
            take(pos.saturating_add(pow_sat(n, lvl + 1)))
        } else if lvl > 0 {
            // Covers 0 < lvl < ℓ outside the last super-block and every block of level ℓ.
            take(pos.saturating_add(pow_sat(n, lvl)))
        } else {
            take(pos)
        };
        shifted.push(content);
    }
    Ok(to_assignment(leveled, &shifted))
}

fn to_assignment(leveled: &LeveledStructure, contents: &[Vec<usize>]) -> Assignment {
    let mut out = Assignment::new();
    for (pos, items) in contents.iter().enumerate().take(leveled.surviving_count()) {
        out.extend_bin(leveled.order[pos], items);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{check_capacities, Bin, Item};
    use crate::oracle::ObjectiveOracle;

    fn ids(m: usize) -> Vec<String> {
        (0..m).map(|b| format!("b{b:02}")).collect()
    }

    #[test]
    fn nineteen_bins_base_two() {
        let caps: Vec<f64> = (0..19).map(|b| 100.0 - b as f64).collect();
        let s = structure_in_blocks(&caps, &ids(19), 2).unwrap();
        let sizes: Vec<usize> = s.blocks.iter().map(|r| r.len()).collect();
        assert_eq!(sizes, vec![1, 1, 1, 1, 2, 2, 2, 2, 4]);
        assert_eq!(s.surviving_count(), 16);
        assert_eq!(s.discarded_bins().len(), 3);
        assert_eq!(s.reduced[4], 95.0);
        assert_eq!(s.reduced[5], 95.0);
        assert_eq!(s.reduced[12], 85.0);
    }

    #[test]
    fn small_bin_sets() {
        let s = structure_in_blocks(&[5.0, 7.0, 6.0], &ids(3), 2).unwrap();
        assert_eq!(s.k(), 2);
        assert_eq!(s.order, vec![1, 2, 0]);
        assert_eq!(s.reduced, vec![7.0, 6.0, 5.0]);
        let s = structure_in_blocks(&[4.0], &ids(1), 3).unwrap();
        assert_eq!((s.k(), s.reduced.clone()), (0, vec![4.0]));
        assert!(structure_in_blocks::<String>(&[], &[], 2).is_err());
        assert!(structure_in_blocks(&[1.0], &ids(1), 1).is_err());
    }

    #[test]
    fn ties_broken_by_id() {
        let s = structure_in_blocks(&[3.0, 3.0, 3.0], &["c", "a", "b"], 2).unwrap();
        assert_eq!(s.order, vec![1, 2, 0]);
    }

    #[test]
    fn huge_base_does_not_overflow() {
        let s = structure_in_blocks(&[1.0; 5], &ids(5), usize::MAX / 2).unwrap();
        assert_eq!(s.blocks.len(), 5);
    }

    fn unit_instance(m: usize, caps: Vec<f64>, n_items: usize, weights: Vec<f64>) -> SmkpInstance {
        let items = (0..n_items).map(|i| Item { id: format!("i{i:02}"), weight: weights[i] }).collect();
        let bins = (0..m).map(|b| Bin { id: format!("b{b:02}"), capacity: caps[b] }).collect();
        SmkpInstance::new(items, bins, ObjectiveOracle::modular(vec![1.0; n_items]).unwrap()).unwrap()
    }

    #[test]
    fn level_zero_is_identity() {
        let inst = unit_instance(3, vec![5.0, 4.0, 3.0], 3, vec![5.0, 4.0, 3.0]);
        let s = structure_in_blocks(&inst.capacities(), &ids(3), 2).unwrap();
        let a = Assignment::from_bins([(0, vec![0]), (1, vec![1]), (2, vec![2])]);
        assert_eq!(transform_assignment(&inst, &s, &a).unwrap(), a);
        assert!(transform_assignment(&inst, &s, &Assignment::new()).unwrap().is_empty());
    }

    #[test]
    fn keeps_most_value_on_nineteen_bins() {
        // One unit item per bin, capacities equal to weights: every bin is full.
        let caps: Vec<f64> = (0..19).map(|b| 100.0 - b as f64).collect();
        let inst = unit_instance(19, caps.clone(), 19, caps.clone());
        let s = structure_in_blocks(&caps, &ids(19), 2).unwrap();
        let a = Assignment::from_bins((0..19).map(|b| (b, vec![b])));
        let out = transform_assignment(&inst, &s, &a).unwrap();
        let verdict = check_capacities(&inst.weights(), &s.leveled_capacities(), &out).unwrap();
        assert!(verdict.feasible, "{verdict:?}");
        assert!(out.union().len() as f64 >= 0.5 * 19.0);
        assert!(out.union().iter().all(|i| a.union().contains(i)));
    }

    #[test]
    fn rejects_overlap_and_infeasible() {
        let inst = unit_instance(2, vec![5.0, 5.0], 2, vec![1.0, 6.0]);
        let s = structure_in_blocks(&inst.capacities(), &ids(2), 2).unwrap();
        let dup = Assignment::from_bins([(0, vec![0]), (1, vec![0])]);
        assert!(transform_assignment(&inst, &s, &dup).is_err());
        let heavy = Assignment::from_bins([(0, vec![1])]);
        assert!(transform_assignment(&inst, &s, &heavy).is_err());
    }
}
