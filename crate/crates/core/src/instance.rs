//! Instances, assignments and feasibility.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{input_err, Result};
use crate::numeric::leq;
use crate::oracle::{ObjectiveOracle, SetFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub id: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    pub id: String,
    pub capacity: f64,
}

/// Items with weights, bins with capacities, and a monotone submodular objective over the items.
///
/// Items and bins are addressed by their position; ids are kept for I/O and tie-breaking.
#[derive(Debug, Clone, PartialEq)]
pub struct SmkpInstance<F = ObjectiveOracle> {
    pub items: Vec<Item>,
    pub bins: Vec<Bin>,
    pub objective: F,
}

impl<F: SetFunction> SmkpInstance<F> {
    pub fn new(items: Vec<Item>, bins: Vec<Bin>, objective: F) -> Result<Self> {
        let mut seen = HashSet::new();
        for item in &items {
            if !seen.insert(item.id.as_str()) {
                return input_err(format!("duplicate item id {:?}", item.id));
            }
            if !(item.weight.is_finite() && item.weight >= 0.0) {
                return input_err(format!("item {:?} has invalid weight {}", item.id, item.weight));
            }
        }
        seen.clear();
        for bin in &bins {
            if !seen.insert(bin.id.as_str()) {
                return input_err(format!("duplicate bin id {:?}", bin.id));
            }
            if !(bin.capacity.is_finite() && bin.capacity >= 0.0) {
                return input_err(format!("bin {:?} has invalid capacity {}", bin.id, bin.capacity));
            }
        }
        if objective.ground_size() != items.len() {
            return input_err(format!(
                "objective is defined over {} items but the instance has {}",
                objective.ground_size(),
                items.len()
            ));
        }
        Ok(SmkpInstance { items, bins, objective })
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn bin_count(&self) -> usize {
        self.bins.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.items.iter().map(|i| i.weight).collect()
    }

    pub fn capacities(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.capacity).collect()
    }

    pub fn weight_of(&self, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.items[i].weight).sum()
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.items.iter().position(|i| i.id == id)
    }

    pub fn bin_index(&self, id: &str) -> Option<usize> {
        self.bins.iter().position(|b| b.id == id)
    }
}

/// Per-bin item sets, keyed by bin index. Bins absent from the map hold nothing.
///
/// The same item may sit in several bins; the objective only sees the union.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Assignment {
    bins: BTreeMap<usize, Vec<usize>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from `(bin, items)` pairs; items are sorted and deduplicated per bin.
    pub fn from_bins(pairs: impl IntoIterator<Item = (usize, Vec<usize>)>) -> Self {
        let mut a = Assignment::new();
        for (bin, items) in pairs {
            for i in items {
                a.insert(bin, i);
            }
        }
        a
    }

    pub fn insert(&mut self, bin: usize, item: usize) {
        let slot = self.bins.entry(bin).or_default();
        if let Err(pos) = slot.binary_search(&item) {
            slot.insert(pos, item);
        }
    }

    pub fn extend_bin(&mut self, bin: usize, items: &[usize]) {
        for &i in items {
            self.insert(bin, i);
        }
    }

    pub fn bin(&self, bin: usize) -> &[usize] {
        self.bins.get(&bin).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Non-empty bins in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.bins.iter().filter(|(_, v)| !v.is_empty()).map(|(&b, v)| (b, v.as_slice()))
    }

    /// Sorted, deduplicated union of all bins.
    pub fn union(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.bins.values().flatten().copied().collect();
        set.into_iter().collect()
    }

    /// Total number of (bin, item) placements.
    pub fn placements(&self) -> usize {
        self.bins.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.placements() == 0
    }

    /// Union of two assignments bin by bin.
    pub fn merged(&self, other: &Assignment) -> Assignment {
        let mut out = self.clone();
        for (b, items) in other.iter() {
            out.extend_bin(b, items);
        }
        out
    }

    /// Rename bins (and items) through index maps, e.g. from a sub-instance back to its parent.
    pub fn remap(&self, bin_map: &[usize], item_map: &[usize]) -> Assignment {
        let mut out = Assignment::new();
        for (b, items) in self.iter() {
            for &i in items {
                out.insert(bin_map[b], item_map[i]);
            }
        }
        out
    }

    pub fn load(&self, bin: usize, weights: &[f64]) -> f64 {
        self.bin(bin).iter().map(|&i| weights[i]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ViolationKind {
    /// Bin load above capacity.
    Capacity,
    /// Item heavier than `δ·W_b` in a restricted bin.
    Restriction,
    /// Item placed into a bin that is not available (e.g. discarded by structuring).
    UnavailableBin,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityViolation {
    pub kind: ViolationKind,
    pub bin: usize,
    /// Load for capacity violations, the offending item weight for restriction violations.
    pub amount: f64,
    pub limit: f64,
    pub item: Option<usize>,
}

/// Verdict plus the first violation in bin order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub violation: Option<FeasibilityViolation>,
}

impl Feasibility {
    fn ok() -> Self {
        Feasibility { feasible: true, violation: None }
    }
    fn fail(v: FeasibilityViolation) -> Self {
        Feasibility { feasible: false, violation: Some(v) }
    }
}

fn check_ids(assignment: &Assignment, items: usize, bins: usize) -> Result<()> {
    for (b, set) in assignment.iter() {
        if b >= bins {
            return input_err(format!("assignment references unknown bin index {b}"));
        }
        if let Some(&i) = set.iter().find(|&&i| i >= items) {
            return input_err(format!("assignment references unknown item index {i}"));
        }
    }
    Ok(())
}

/// Capacity check against an explicit capacity table; `None` marks a bin that may not be used.
pub fn check_capacities(
    weights: &[f64],
    capacities: &[Option<f64>],
    assignment: &Assignment,
) -> Result<Feasibility> {
    check_ids(assignment, weights.len(), capacities.len())?;
    for (b, set) in assignment.iter() {
        let load = assignment.load(b, weights);
        match capacities[b] {
            None => {
                return Ok(Feasibility::fail(FeasibilityViolation {
                    kind: ViolationKind::UnavailableBin,
                    bin: b,
                    amount: load,
                    limit: 0.0,
                    item: set.first().copied(),
                }))
            }
            Some(cap) if !leq(load, cap) => {
                return Ok(Feasibility::fail(FeasibilityViolation {
                    kind: ViolationKind::Capacity,
                    bin: b,
                    amount: load,
                    limit: cap,
                    item: None,
                }))
            }
            _ => {}
        }
    }
    Ok(Feasibility::ok())
}

/// `w(A_b) <= W_b` for every bin.
pub fn check_feasible<F: SetFunction>(
    instance: &SmkpInstance<F>,
    assignment: &Assignment,
) -> Result<Feasibility> {
    let caps: Vec<Option<f64>> = instance.bins.iter().map(|b| Some(b.capacity)).collect();
    check_capacities(&instance.weights(), &caps, assignment)
}

/// `f(∪_b A_b)`.
pub fn assignment_value<F: SetFunction>(instance: &SmkpInstance<F>, assignment: &Assignment) -> f64 {
    instance.objective.value(&assignment.union())
}

/// Keep each item only in the first bin (by bin index) that holds it.
pub fn dedup_assignment(assignment: &Assignment) -> Assignment {
    let mut seen = HashSet::new();
    let mut out = Assignment::new();
    for (b, items) in assignment.iter() {
        for &i in items {
            if seen.insert(i) {
                out.insert(b, i);
            }
        }
    }
    out
}

/// An instance where designated bins only accept items of weight at most `δ·W_b`.
#[derive(Debug, Clone)]
pub struct RestrictedInstance<F = ObjectiveOracle> {
    pub base: SmkpInstance<F>,
    pub restricted: BTreeSet<usize>,
    pub delta: f64,
}

impl<F: SetFunction> RestrictedInstance<F> {
    pub fn new(base: SmkpInstance<F>, restricted: BTreeSet<usize>, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return input_err(format!("delta must lie in (0, 1], got {delta}"));
        }
        if let Some(&b) = restricted.iter().find(|&&b| b >= base.bin_count()) {
            return input_err(format!("restricted bin index {b} out of range"));
        }
        Ok(RestrictedInstance { base, restricted, delta })
    }

    /// Whether item `i` may be placed into bin `b`.
    pub fn allows(&self, item: usize, bin: usize) -> bool {
        !self.restricted.contains(&bin)
            || leq(self.base.items[item].weight, self.delta * self.base.bins[bin].capacity)
    }

    /// Capacity feasibility plus the δ rule on restricted bins.
    pub fn check_feasible(&self, assignment: &Assignment) -> Result<Feasibility> {
        let verdict = check_feasible(&self.base, assignment)?;
        if !verdict.feasible {
            return Ok(verdict);
        }
        for (b, set) in assignment.iter() {
            if let Some(&i) = set.iter().find(|&&i| !self.allows(i, b)) {
                return Ok(Feasibility::fail(FeasibilityViolation {
                    kind: ViolationKind::Restriction,
                    bin: b,
                    amount: self.base.items[i].weight,
                    limit: self.delta * self.base.bins[b].capacity,
                    item: Some(i),
                }));
            }
        }
        Ok(Feasibility::ok())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn items(weights: &[f64]) -> Vec<Item> {
        weights.iter().enumerate().map(|(k, &w)| Item { id: format!("i{k}"), weight: w }).collect()
    }

    pub(crate) fn bins(caps: &[f64]) -> Vec<Bin> {
        caps.iter().enumerate().map(|(k, &c)| Bin { id: format!("b{k}"), capacity: c }).collect()
    }

    fn modular(weights: &[f64], caps: &[f64], values: Vec<f64>) -> SmkpInstance {
        SmkpInstance::new(items(weights), bins(caps), ObjectiveOracle::modular(values).unwrap())
            .unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let inst = modular(&[3.0, 2.0, 6.0], &[5.0], vec![1.0; 3]);
        let ok = Assignment::from_bins([(0, vec![0, 1])]);
        assert!(check_feasible(&inst, &ok).unwrap().feasible);
        let bad = Assignment::from_bins([(0, vec![2])]);
        let verdict = check_feasible(&inst, &bad).unwrap();
        assert!(!verdict.feasible);
        let v = verdict.violation.unwrap();
        assert_eq!((v.bin, v.amount, v.limit), (0, 6.0, 5.0));
    }

    #[test]
    fn restricted_rule() {
        let inst = modular(&[3.0], &[10.0], vec![1.0]);
        let r = RestrictedInstance::new(inst, BTreeSet::from([0]), 0.2).unwrap();
        let a = Assignment::from_bins([(0, vec![0])]);
        let verdict = r.check_feasible(&a).unwrap();
        assert!(!verdict.feasible);
        assert_eq!(verdict.violation.unwrap().kind, ViolationKind::Restriction);
    }

    #[test]
    fn unknown_ids_are_errors() {
        let inst = modular(&[1.0], &[1.0], vec![1.0]);
        assert!(check_feasible(&inst, &Assignment::from_bins([(3, vec![0])])).is_err());
        assert!(check_feasible(&inst, &Assignment::from_bins([(0, vec![7])])).is_err());
    }

    #[test]
    fn value_uses_union() {
        let inst = modular(&[1.0, 1.0], &[5.0, 5.0], vec![3.0, 5.0]);
        assert_eq!(assignment_value(&inst, &Assignment::new()), 0.0);
        let split = Assignment::from_bins([(0, vec![0]), (1, vec![1])]);
        assert_eq!(assignment_value(&inst, &split), 8.0);
        let dup = Assignment::from_bins([(0, vec![0]), (1, vec![0])]);
        assert_eq!(assignment_value(&inst, &dup), 3.0);
    }

    #[test]
    fn dedup_keeps_first_bin() {
        let dup = Assignment::from_bins([(0, vec![0]), (1, vec![0, 1])]);
        let d = dedup_assignment(&dup);
        assert_eq!(d.bin(0), &[0]);
        assert_eq!(d.bin(1), &[1]);
        let disjoint = Assignment::from_bins([(0, vec![0]), (1, vec![1])]);
        assert_eq!(dedup_assignment(&disjoint), disjoint);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut it = items(&[1.0, 1.0]);
        it[1].id = "i0".into();
        let res = SmkpInstance::new(it, bins(&[1.0]), ObjectiveOracle::modular(vec![1.0; 2]).unwrap());
        assert!(res.is_err());
    }
}
