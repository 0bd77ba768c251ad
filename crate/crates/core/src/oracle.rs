//! Monotone submodular set functions over item indices.
//!
//! Everything the solver evaluates goes through [`SetFunction`]. Three concrete objective
//! families are shipped in [`ObjectiveOracle`]; [`ResidualOracle`] and [`LiftedOracle`] build
//! the marginal function `f_A(S) = f(A ∪ S) - f(A)` and the union-valued lift
//! `g(T) = f(∪_{e ∈ T} S_e)` on top of any other set function.
//!
//! Sets are passed as slices of indices. Duplicate indices are tolerated everywhere and count
//! once, which is what the union semantics of assignments and lifted elements require.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{input_err, Result};

/// A non-negative set function over the ground set `0..ground_size()`.
///
/// Implementations must be pure: the same set always evaluates to the same value. The only
/// mutable state allowed is the evaluation counter, which is atomic so oracles can be shared
/// across worker threads.
pub trait SetFunction: Sync {
    fn ground_size(&self) -> usize;

    /// `f(set)`; indices must be `< ground_size()`.
    fn value(&self, set: &[usize]) -> f64;

    /// Writes `f(base ∪ candidates[c]) - f(base)` into `out[c]` for every candidate.
    ///
    /// The default evaluates each union separately; concrete oracles override this with an
    /// incremental version that prepares `base` once.
    fn gains(&self, base: &[usize], candidates: &[&[usize]], out: &mut [f64]) {
        let base_value = self.value(base);
        let mut scratch = Vec::with_capacity(base.len() + 8);
        for (slot, cand) in out.iter_mut().zip(candidates) {
            scratch.clear();
            scratch.extend_from_slice(base);
            scratch.extend_from_slice(cand);
            *slot = self.value(&scratch) - base_value;
        }
    }

    /// Number of logical oracle evaluations performed so far.
    fn evaluations(&self) -> u64 {
        0
    }
}

impl<T: SetFunction + ?Sized> SetFunction for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, set: &[usize]) -> f64 {
        (**self).value(set)
    }
    fn gains(&self, base: &[usize], candidates: &[&[usize]], out: &mut [f64]) {
        (**self).gains(base, candidates, out)
    }
    fn evaluations(&self) -> u64 {
        (**self).evaluations()
    }
}

/// `f(S)` with the item indices validated first.
pub fn evaluate<F: SetFunction + ?Sized>(f: &F, set: &[usize]) -> Result<f64> {
    let n = f.ground_size();
    if let Some(bad) = set.iter().find(|&&i| i >= n) {
        return input_err(format!("unknown item index {bad} (ground set has {n} items)"));
    }
    Ok(f.value(set))
}

/// `f(S ∪ {i}) - f(S)`; returns 0 when `i` is already in `S`.
pub fn marginal<F: SetFunction + ?Sized>(f: &F, set: &[usize], item: usize) -> f64 {
    if set.contains(&item) {
        return 0.0;
    }
    let mut out = [0.0];
    f.gains(set, &[&[item]], &mut out);
    out[0]
}

/// Parameters of the shipped objective families.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveKind {
    /// `f(S) = Σ_{i ∈ S} value_i`.
    Modular { values: Vec<f64> },
    /// `f(S) = Σ weight_u` over universe elements `u` covered by some item of `S`.
    WeightedCoverage {
        /// Universe element names and weights.
        universe: Vec<(String, f64)>,
        /// Per item, the universe indices it covers.
        covers: Vec<Vec<usize>>,
    },
    /// `f(S) = Σ_g min(cap_g, Σ_{i ∈ S} contrib_{i,g})`.
    GroupSaturation {
        /// Group names and caps.
        groups: Vec<(String, f64)>,
        /// Per item, `(group index, contribution)` pairs.
        contrib: Vec<Vec<(usize, f64)>>,
    },
}

impl ObjectiveKind {
    fn ground_size(&self) -> usize {
        match self {
            ObjectiveKind::Modular { values } => values.len(),
            ObjectiveKind::WeightedCoverage { covers, .. } => covers.len(),
            ObjectiveKind::GroupSaturation { contrib, .. } => contrib.len(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::Modular { .. } => "modular",
            ObjectiveKind::WeightedCoverage { .. } => "weighted_coverage",
            ObjectiveKind::GroupSaturation { .. } => "group_saturation",
        }
    }
}

/// One of the shipped objective families plus an evaluation counter.
#[derive(Debug)]
pub struct ObjectiveOracle {
    kind: ObjectiveKind,
    calls: AtomicU64,
}

impl Clone for ObjectiveOracle {
    fn clone(&self) -> Self {
        ObjectiveOracle::new(self.kind.clone()).expect("cloned from a validated oracle")
    }
}

impl PartialEq for ObjectiveOracle {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl ObjectiveOracle {
    pub fn new(kind: ObjectiveKind) -> Result<Self> {
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        match &kind {
            ObjectiveKind::Modular { values } => {
                if !values.iter().all(|&v| nonneg(v)) {
                    return input_err("modular values must be finite and non-negative");
                }
            }
            ObjectiveKind::WeightedCoverage { universe, covers } => {
                if !universe.iter().all(|(_, w)| nonneg(*w)) {
                    return input_err("coverage weights must be finite and non-negative");
                }
                if covers.iter().flatten().any(|&u| u >= universe.len()) {
                    return input_err("cover set references an unknown universe element");
                }
            }
            ObjectiveKind::GroupSaturation { groups, contrib } => {
                if !groups.iter().all(|(_, c)| nonneg(*c)) {
                    return input_err("group caps must be finite and non-negative");
                }
                for row in contrib {
                    for &(g, v) in row {
                        if g >= groups.len() {
                            return input_err("contribution references an unknown group");
                        }
                        if !nonneg(v) {
                            return input_err("contributions must be finite and non-negative");
                        }
                    }
                }
            }
        }
        Ok(ObjectiveOracle { kind, calls: AtomicU64::new(0) })
    }

    pub fn modular(values: Vec<f64>) -> Result<Self> {
        Self::new(ObjectiveKind::Modular { values })
    }

    /// Coverage oracle with auto-named universe elements `u0, u1, ...`.
    pub fn coverage(weights: Vec<f64>, covers: Vec<Vec<usize>>) -> Result<Self> {
        let universe = weights.into_iter().enumerate().map(|(k, w)| (format!("u{k}"), w)).collect();
        Self::new(ObjectiveKind::WeightedCoverage { universe, covers })
    }

    /// Saturation oracle with auto-named groups `g0, g1, ...`.
    pub fn saturation(caps: Vec<f64>, contrib: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let groups = caps.into_iter().enumerate().map(|(k, c)| (format!("g{k}"), c)).collect();
        Self::new(ObjectiveKind::GroupSaturation { groups, contrib })
    }

    pub fn kind(&self) -> &ObjectiveKind {
        &self.kind
    }

    pub fn reset_counter(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    fn count(&self, k: u64) {
        self.calls.fetch_add(k, Ordering::Relaxed);
    }

    fn prepare(&self, base: &[usize]) -> Prepared {
        let n = self.kind.ground_size();
        let mut in_set = vec![false; n];
        for &i in base {
            in_set[i] = true;
        }
        let (aux, value) = match &self.kind {
            ObjectiveKind::Modular { values } => {
                let v = (0..n).filter(|&i| in_set[i]).map(|i| values[i]).sum();
                (Vec::new(), v)
            }
            ObjectiveKind::WeightedCoverage { universe, covers } => {
                let mut covered = vec![0.0; universe.len()];
                let mut v = 0.0;
                for i in (0..n).filter(|&i| in_set[i]) {
                    for &u in &covers[i] {
                        if covered[u] == 0.0 {
                            covered[u] = 1.0;
                            v += universe[u].1;
                        }
                    }
                }
                (covered, v)
            }
            ObjectiveKind::GroupSaturation { groups, contrib } => {
                let mut totals = vec![0.0; groups.len()];
                for i in (0..n).filter(|&i| in_set[i]) {
                    for &(g, c) in &contrib[i] {
                        totals[g] += c;
                    }
                }
                let v = totals.iter().zip(groups).map(|(t, (_, cap))| t.min(*cap)).sum();
                (totals, v)
            }
        };
        Prepared { in_set, aux, value }
    }
}

/// Per-base cache used by the incremental gain computation.
struct Prepared {
    in_set: Vec<bool>,
    /// Coverage: 1.0 per covered universe element. Saturation: per-group totals.
    aux: Vec<f64>,
    value: f64,
}

impl SetFunction for ObjectiveOracle {
    fn ground_size(&self) -> usize {
        self.kind.ground_size()
    }

    fn value(&self, set: &[usize]) -> f64 {
        self.count(1);
        self.prepare(set).value
    }

    fn gains(&self, base: &[usize], candidates: &[&[usize]], out: &mut [f64]) {
        self.count(1 + candidates.len() as u64);
        let mut prep = self.prepare(base);
        // Items touched by the current candidate; reverted after each one.
        let mut touched: Vec<usize> = Vec::new();
        match &self.kind {
            ObjectiveKind::Modular { values } => {
                for (slot, cand) in out.iter_mut().zip(candidates) {
                    let mut gain = 0.0;
                    for &i in cand.iter() {
                        if !prep.in_set[i] {
                            prep.in_set[i] = true;
                            touched.push(i);
                            gain += values[i];
                        }
                    }
                    for i in touched.drain(..) {
                        prep.in_set[i] = false;
                    }
                    *slot = gain;
                }
            }
            ObjectiveKind::WeightedCoverage { universe, covers } => {
                let mut newly: Vec<usize> = Vec::new();
                for (slot, cand) in out.iter_mut().zip(candidates) {
                    let mut gain = 0.0;
                    for &i in cand.iter() {
                        if prep.in_set[i] {
                            continue;
                        }
                        prep.in_set[i] = true;
                        touched.push(i);
                        for &u in &covers[i] {
                            if prep.aux[u] == 0.0 {
                                prep.aux[u] = 1.0;
                                newly.push(u);
                                gain += universe[u].1;
                            }
                        }
                    }
                    for i in touched.drain(..) {
                        prep.in_set[i] = false;
                    }
                    for u in newly.drain(..) {
                        prep.aux[u] = 0.0;
                    }
                    *slot = gain;
                }
            }
            ObjectiveKind::GroupSaturation { groups, contrib } => {
                let mut added = vec![0.0; groups.len()];
                let mut groups_touched: Vec<usize> = Vec::new();
                for (slot, cand) in out.iter_mut().zip(candidates) {
                    for &i in cand.iter() {
                        if prep.in_set[i] {
                            continue;
                        }
                        prep.in_set[i] = true;
                        touched.push(i);
                        for &(g, c) in &contrib[i] {
                            if added[g] == 0.0 {
                                groups_touched.push(g);
                            }
                            added[g] += c;
                        }
                    }
                    let mut gain = 0.0;
                    for g in groups_touched.drain(..) {
                        let cap = groups[g].1;
                        let before = prep.aux[g].min(cap);
                        gain += (prep.aux[g] + added[g]).min(cap) - before;
                        added[g] = 0.0;
                    }
                    for i in touched.drain(..) {
                        prep.in_set[i] = false;
                    }
                    *slot = gain;
                }
            }
        }
    }

    fn evaluations(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

/// The marginal function `f_A(S) = f(A ∪ S) - f(A)` on a (possibly re-indexed) ground set.
///
/// `ground[local]` maps a local item index to the base oracle's index, so a residual instance
/// can drop items without renumbering the base objective.
#[derive(Debug, Clone)]
pub struct ResidualOracle<F> {
    base: F,
    anchor: Vec<usize>,
    anchor_value: f64,
    ground: Vec<usize>,
}

impl<F: SetFunction> ResidualOracle<F> {
    pub fn new(base: F, anchor: Vec<usize>, ground: Vec<usize>) -> Result<Self> {
        let n = base.ground_size();
        if anchor.iter().chain(&ground).any(|&i| i >= n) {
            return input_err("residual oracle references an unknown item");
        }
        let anchor_value = base.value(&anchor);
        Ok(ResidualOracle { base, anchor, anchor_value, ground })
    }

    /// `f_A` over the full base ground set (identity index map).
    pub fn over_all_items(base: F, anchor: Vec<usize>) -> Result<Self> {
        let ground = (0..base.ground_size()).collect();
        Self::new(base, anchor, ground)
    }

    pub fn anchor(&self) -> &[usize] {
        &self.anchor
    }

    /// Cached `f(A)`.
    pub fn anchor_value(&self) -> f64 {
        self.anchor_value
    }

    /// Local index → base index.
    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    fn lift(&self, set: &[usize], out: &mut Vec<usize>) {
        out.clear();
        out.extend_from_slice(&self.anchor);
        out.extend(set.iter().map(|&i| self.ground[i]));
    }
}

impl<F: SetFunction> SetFunction for ResidualOracle<F> {
    fn ground_size(&self) -> usize {
        self.ground.len()
    }

    fn value(&self, set: &[usize]) -> f64 {
        let mut full = Vec::with_capacity(self.anchor.len() + set.len());
        self.lift(set, &mut full);
        (self.base.value(&full) - self.anchor_value).max(0.0)
    }

    fn gains(&self, base: &[usize], candidates: &[&[usize]], out: &mut [f64]) {
        let mut full = Vec::with_capacity(self.anchor.len() + base.len());
        self.lift(base, &mut full);
        let mut flat = Vec::new();
        let mut bounds = Vec::with_capacity(candidates.len());
        for cand in candidates {
            let start = flat.len();
            flat.extend(cand.iter().map(|&i| self.ground[i]));
            bounds.push((start, flat.len()));
        }
        let mapped: Vec<&[usize]> = bounds.iter().map(|&(a, b)| &flat[a..b]).collect();
        self.base.gains(&full, &mapped, out);
    }

    fn evaluations(&self) -> u64 {
        self.base.evaluations()
    }
}

/// The union-valued lift `g(T) = f(∪_{e ∈ T} S_e)` over an element universe.
///
/// Each element carries an item set; the same item may appear in several elements and is
/// counted once in the union.
#[derive(Debug, Clone)]
pub struct LiftedOracle<F> {
    base: F,
    element_items: Vec<Vec<usize>>,
}

impl<F: SetFunction> LiftedOracle<F> {
    pub fn new(base: F, element_items: Vec<Vec<usize>>) -> Result<Self> {
        let n = base.ground_size();
        if element_items.iter().flatten().any(|&i| i >= n) {
            return input_err("lifted element references an unknown item");
        }
        Ok(LiftedOracle { base, element_items })
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn element_items(&self) -> &[Vec<usize>] {
        &self.element_items
    }

    /// `∪_{e ∈ elements} S_e` as a flat (possibly repeating) item list.
    pub fn union_items(&self, elements: &[usize]) -> Vec<usize> {
        elements.iter().flat_map(|&e| self.element_items[e].iter().copied()).collect()
    }

    /// `g(T ∪ {e}) - g(T)` for every element `e`, computed with one prepared base.
    pub fn element_gains(&self, elements: &[usize], out: &mut [f64]) {
        let base = self.union_items(elements);
        let cands: Vec<&[usize]> = self.element_items.iter().map(Vec::as_slice).collect();
        self.base.gains(&base, &cands, out);
    }
}

impl<F: SetFunction> SetFunction for LiftedOracle<F> {
    fn ground_size(&self) -> usize {
        self.element_items.len()
    }

    fn value(&self, set: &[usize]) -> f64 {
        self.base.value(&self.union_items(set))
    }

    fn gains(&self, base: &[usize], candidates: &[&[usize]], out: &mut [f64]) {
        let items = self.union_items(base);
        let lifted: Vec<Vec<usize>> = candidates.iter().map(|c| self.union_items(c)).collect();
        let refs: Vec<&[usize]> = lifted.iter().map(Vec::as_slice).collect();
        self.base.gains(&items, &refs, out);
    }

    fn evaluations(&self) -> u64 {
        self.base.evaluations()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modular_ab() -> ObjectiveOracle {
        ObjectiveOracle::modular(vec![3.0, 5.0]).unwrap()
    }

    fn coverage_ab() -> ObjectiveOracle {
        // a covers {u, v}, b covers {v}
        ObjectiveOracle::coverage(vec![1.0, 1.0], vec![vec![0, 1], vec![1]]).unwrap()
    }

    fn saturation_ab() -> ObjectiveOracle {
        ObjectiveOracle::saturation(vec![4.0], vec![vec![(0, 3.0)], vec![(0, 3.0)]]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&modular_ab(), &[0, 1]).unwrap(), 8.0);
        assert_eq!(evaluate(&coverage_ab(), &[0, 1]).unwrap(), 2.0);
        assert_eq!(evaluate(&saturation_ab(), &[0, 1]).unwrap(), 4.0);
    }

    #[test]
    fn evaluate_rejects_unknown_item() {
        assert!(evaluate(&modular_ab(), &[2]).is_err());
    }

    #[test]
    fn evaluate_counts_calls() {
        let f = modular_ab();
        evaluate(&f, &[0]).unwrap();
        evaluate(&f, &[1]).unwrap();
        assert_eq!(f.evaluations(), 2);
    }

    #[test]
    fn empty_set_is_zero() {
        for f in [modular_ab(), coverage_ab(), saturation_ab()] {
            assert_eq!(f.value(&[]), 0.0);
        }
    }

    #[test]
    fn marginal_examples() {
        assert_eq!(marginal(&coverage_ab(), &[0], 1), 0.0);
        assert_eq!(marginal(&modular_ab(), &[0], 1), 5.0);
        assert_eq!(marginal(&saturation_ab(), &[0], 1), 1.0);
        // already present
        assert_eq!(marginal(&modular_ab(), &[0, 1], 1), 0.0);
    }

    #[test]
    fn duplicates_count_once() {
        assert_eq!(modular_ab().value(&[0, 0, 1]), 8.0);
        assert_eq!(saturation_ab().value(&[0, 0]), 3.0);
    }

    #[test]
    fn incremental_gains_match_direct_evaluation() {
        let f = ObjectiveOracle::saturation(
            vec![5.0, 2.0],
            vec![vec![(0, 3.0), (1, 1.0)], vec![(0, 4.0)], vec![(1, 2.0)]],
        )
        .unwrap();
        let cands: Vec<&[usize]> = vec![&[1], &[2], &[1, 2], &[0], &[2, 2]];
        let mut out = vec![0.0; cands.len()];
        f.gains(&[0], &cands, &mut out);
        for (c, g) in cands.iter().zip(&out) {
            let mut u = vec![0];
            u.extend_from_slice(c);
            assert!((f.value(&u) - f.value(&[0]) - g).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_is_marginal_function() {
        let f = coverage_ab();
        let r = ResidualOracle::over_all_items(&f, vec![1]).unwrap();
        assert_eq!(r.anchor_value(), 1.0);
        assert_eq!(r.value(&[0]), 1.0);
        assert_eq!(r.value(&[]), 0.0);
    }

    #[test]
    fn residual_reindexes_ground() {
        let f = ObjectiveOracle::modular(vec![10.0, 1.0, 7.0]).unwrap();
        let r = ResidualOracle::new(&f, vec![0], vec![2, 1]).unwrap();
        assert_eq!(r.ground_size(), 2);
        assert_eq!(r.value(&[0]), 7.0);
        assert_eq!(r.value(&[1]), 1.0);
        let mut out = [0.0; 2];
        r.gains(&[1], &[&[0], &[1]], &mut out);
        assert_eq!(out, [7.0, 0.0]);
    }

    #[test]
    fn lifted_union_semantics() {
        let f = modular_ab();
        let g = LiftedOracle::new(&f, vec![vec![0], vec![0, 1], vec![1]]).unwrap();
        assert_eq!(g.value(&[0, 1]), 8.0);
        assert_eq!(g.value(&[0, 2]), 8.0);
        let mut out = [0.0; 3];
        g.element_gains(&[0], &mut out);
        assert_eq!(out, [0.0, 5.0, 5.0]);
    }
}
