//! Block-constraint relaxation of a δ-restricted instance.
//!
//! Every unrestricted block `j` (bins of one shared capacity `W*_j`) contributes
//! *configurations*, sets of `j`-large items (`w_i > μ·W*_j`) that fit one bin, plus one
//! singleton element per `j`-small item. Every restricted bin becomes a singleton block whose
//! elements are the items with `w_i <= δ·W_b`. The polytope keeps two rows per unrestricted
//! block (number of configurations, total weight) and a weight row per restricted block.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{input_err, Result, SmkpError};
use crate::instance::{Assignment, RestrictedInstance};
use crate::numeric::leq;
use crate::oracle::{LiftedOracle, SetFunction};

/// Default ceiling on the number of configurations per block.
pub const DEFAULT_CONFIG_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSpec {
    pub index: usize,
    /// Bin indices of the underlying instance.
    pub bins: Vec<usize>,
    /// Shared capacity `W*_j`.
    pub capacity: f64,
    /// Singleton block built from a restricted bin.
    pub restricted: bool,
}

impl BlockSpec {
    pub fn size(&self) -> usize {
        self.bins.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Element {
    /// Sorted item indices.
    pub items: Vec<usize>,
    pub block: usize,
    pub weight: f64,
    pub is_configuration: bool,
}

/// Right-hand sides of one block's rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockBounds {
    /// Bound on the configuration count; `None` for restricted blocks.
    pub count: Option<f64>,
    pub weight: f64,
}

/// Column of one element: its block, its weight, and whether it counts as a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Column {
    pub block: usize,
    pub weight: f64,
    pub counts: bool,
}

/// `P = {x ∈ [0,1]^E : Σ_{configs of j} x <= count_j, Σ_{elements of j} w·x <= weight_j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockPolytope {
    bounds: Vec<BlockBounds>,
    columns: Vec<Column>,
    #[serde(skip)]
    members: Vec<Vec<usize>>,
}

impl BlockPolytope {
    pub fn new(bounds: Vec<BlockBounds>, columns: Vec<Column>) -> Result<Self> {
        for (j, b) in bounds.iter().enumerate() {
            let count_ok = b.count.is_none_or(|c| c.is_finite() && c >= 0.0);
            if !count_ok || !(b.weight.is_finite() && b.weight >= 0.0) {
                return input_err(format!("block {j} has an invalid bound"));
            }
        }
        let mut members = vec![Vec::new(); bounds.len()];
        for (e, c) in columns.iter().enumerate() {
            if c.block >= bounds.len() {
                return input_err(format!("element {e} refers to unknown block {}", c.block));
            }
            if !(c.weight.is_finite() && c.weight >= 0.0) {
                return input_err(format!("element {e} has invalid weight {}", c.weight));
            }
            if c.counts && bounds[c.block].count.is_none() {
                return input_err(format!("element {e} is a configuration of a restricted block"));
            }
            members[c.block].push(e);
        }
        Ok(BlockPolytope { bounds, columns, members })
    }

    pub fn dimension(&self) -> usize {
        self.columns.len()
    }

    pub fn bounds(&self) -> &[BlockBounds] {
        &self.bounds
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    /// Elements of block `j`.
    pub fn members(&self, block: usize) -> &[usize] {
        &self.members[block]
    }
}

/// A point of `[0,1]^E`, stored densely.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalPoint {
    pub values: Vec<f64>,
}

impl FractionalPoint {
    pub fn zeros(dimension: usize) -> Self {
        FractionalPoint { values: vec![0.0; dimension] }
    }

    /// Indicator vector `x^T`.
    pub fn indicator(dimension: usize, set: &[usize]) -> Self {
        let mut p = Self::zeros(dimension);
        for &e in set {
            p.values[e] = 1.0;
        }
        p
    }

    pub fn scaled(&self, factor: f64) -> Self {
        FractionalPoint { values: self.values.iter().map(|v| v * factor).collect() }
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.values.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&e| self.values[e] > 0.0).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Row {
    Count,
    Weight,
    /// A coordinate outside `[0, 1]`.
    Coordinate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowViolation {
    /// Block index, or the element index for coordinate violations.
    pub index: usize,
    pub row: Row,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub inside: bool,
    /// Smallest `rhs - lhs` over all block rows (positive means strict interior).
    pub min_slack: f64,
    /// First violated row, blocks in index order, count row before weight row.
    pub violation: Option<RowViolation>,
}

fn block_sums(p: &BlockPolytope, mut weight_of: impl FnMut(usize) -> f64, j: usize) -> (f64, f64) {
    let (mut count, mut weight) = (0.0, 0.0);
    for &e in &p.members[j] {
        let x = weight_of(e);
        if x != 0.0 {
            let c = p.columns[e];
            weight += c.weight * x;
            if c.counts {
                count += x;
            }
        }
    }
    (count, weight)
}

fn scan_rows(p: &BlockPolytope, eta: f64, mut x: impl FnMut(usize) -> f64) -> Membership {
    let mut out = Membership { inside: true, min_slack: f64::INFINITY, violation: None };
    for (j, b) in p.bounds.iter().enumerate() {
        let (count, weight) = block_sums(p, &mut x, j);
        let rows = b.count.map(|c| (Row::Count, count, eta * c)).into_iter().chain([(
            Row::Weight,
            weight,
            eta * b.weight,
        )]);
        for (row, lhs, rhs) in rows {
            out.min_slack = out.min_slack.min(rhs - lhs);
            if out.inside && !leq(lhs, rhs) {
                out.inside = false;
                out.violation = Some(RowViolation { index: j, row, lhs, rhs });
            }
        }
    }
    out
}

/// Whether `x ∈ η·P`, with the slack of the tightest row.
pub fn membership(x: &FractionalPoint, p: &BlockPolytope, eta: f64) -> Result<Membership> {
    if !(eta > 0.0 && eta <= 1.0) {
        return input_err(format!("scale eta must lie in (0, 1], got {eta}"));
    }
    if x.values.len() != p.dimension() {
        return input_err(format!(
            "point has {} coordinates, polytope has {}",
            x.values.len(),
            p.dimension()
        ));
    }
    if let Some(e) = x.values.iter().position(|&v| !(leq(0.0, v) && leq(v, 1.0))) {
        return Ok(Membership {
            inside: false,
            min_slack: f64::NEG_INFINITY,
            violation: Some(RowViolation { index: e, row: Row::Coordinate, lhs: x.values[e], rhs: 1.0 }),
        });
    }
    Ok(scan_rows(p, eta, |e| x.values[e]))
}

/// Whether the indicator of `set` lies in `η·P`.
pub fn set_membership(set: &[usize], p: &BlockPolytope, eta: f64) -> Membership {
    let mut mask = vec![false; p.dimension()];
    for &e in set {
        mask[e] = true;
    }
    scan_rows(p, eta, |e| if mask[e] { 1.0 } else { 0.0 })
}

/// Exact maximiser of `λ·x` over `P`.
///
/// `P` is a product over blocks, so each block is solved on its own: a single weight row is a
/// fractional knapsack, two rows go through a bounded-variable simplex.
pub fn linear_maximize(p: &BlockPolytope, lambda: &[f64]) -> Result<FractionalPoint> {
    if lambda.len() != p.dimension() {
        return input_err("one objective coefficient per element is required");
    }
    if lambda.iter().any(|v| !v.is_finite()) {
        return input_err("objective coefficients must be finite");
    }
    let parts: Vec<Vec<(usize, f64)>> = (0..p.bounds.len())
        .into_par_iter()
        .map(|j| solve_block(p, j, lambda))
        .collect();
    let mut x = FractionalPoint::zeros(p.dimension());
    for (e, v) in parts.into_iter().flatten() {
        x.values[e] = v;
    }
    Ok(x)
}

fn solve_block(p: &BlockPolytope, j: usize, lambda: &[f64]) -> Vec<(usize, f64)> {
    let b = p.bounds[j];
    let mut out = Vec::new();
    let mut cols = Vec::new();
    for &e in &p.members[j] {
        if lambda[e] <= 0.0 {
            continue;
        }
        let c = p.columns[e];
        if c.weight == 0.0 && !c.counts {
            out.push((e, 1.0));
        } else {
            cols.push(e);
        }
    }
    let count_rhs = b.count.filter(|_| cols.iter().any(|&e| p.columns[e].counts));
    match count_rhs {
        None => out.extend(fractional_knapsack(p, &cols, lambda, b.weight)),
        Some(c) => out.extend(two_row_simplex(p, &cols, lambda, c, b.weight)),
    }
    out
}

fn fractional_knapsack(p: &BlockPolytope, cols: &[usize], lambda: &[f64], cap: f64) -> Vec<(usize, f64)> {
    let mut order = cols.to_vec();
    order.sort_by(|&a, &b| {
        let (wa, wb) = (p.columns[a].weight, p.columns[b].weight);
        (lambda[b] * wa).total_cmp(&(lambda[a] * wb)).then(a.cmp(&b))
    });
    let mut left = cap;
    let mut out = Vec::new();
    for e in order {
        let w = p.columns[e].weight;
        if left <= 0.0 {
            break;
        }
        let frac = (left / w).min(1.0);
        out.push((e, frac));
        left -= frac * w;
    }
    out
}

/// Bounded-variable primal simplex for
/// `max λ·x  s.t.  Σ_{counts} x <= c,  Σ w·x <= W,  0 <= x <= 1`
/// with slack variables as the starting basis.
fn two_row_simplex(
    p: &BlockPolytope,
    cols: &[usize],
    lambda: &[f64],
    count_rhs: f64,
    weight_rhs: f64,
) -> Vec<(usize, f64)> {
    let n = cols.len();
    // Variables 0..n structural (upper 1), n and n+1 slacks (upper ∞).
    let column = |v: usize| -> [f64; 2] {
        if v < n {
            let c = p.columns[cols[v]];
            [if c.counts { 1.0 } else { 0.0 }, c.weight]
        } else if v == n {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        }
    };
    let cost = |v: usize| if v < n { lambda[cols[v]] } else { 0.0 };
    let upper = |v: usize| if v < n { 1.0 } else { f64::INFINITY };
    let scale = [count_rhs.abs().max(1.0), weight_rhs.abs().max(1.0)];

    let mut x = vec![0.0; n + 2];
    x[n] = count_rhs;
    x[n + 1] = weight_rhs;
    let mut basis = [n, n + 1];
    let mut is_basic = vec![false; n + 2];
    is_basic[n] = true;
    is_basic[n + 1] = true;
    let tol = 1e-12;
    let bland_after = 50 * (n + 2);

    for iter in 0..(1000 * (n + 2)) {
        let a0 = column(basis[0]);
        let a1 = column(basis[1]);
        let det = a0[0] * a1[1] - a1[0] * a0[1];
        // B^{-1} for B = [a0 a1].
        let inv = [[a1[1] / det, -a1[0] / det], [-a0[1] / det, a0[0] / det]];
        let cb = [cost(basis[0]), cost(basis[1])];
        let y = [cb[0] * inv[0][0] + cb[1] * inv[1][0], cb[0] * inv[0][1] + cb[1] * inv[1][1]];

        let mut entering: Option<(usize, f64, f64)> = None;
        for v in 0..n + 2 {
            if is_basic[v] {
                continue;
            }
            let a = column(v);
            let d = cost(v) - y[0] * a[0] - y[1] * a[1];
            let thresh = tol * (1.0 + cost(v).abs());
            let dir = if x[v] <= 0.0 && d > thresh {
                1.0
            } else if x[v] >= upper(v) && d < -thresh {
                -1.0
            } else {
                continue;
            };
            let better = match entering {
                None => true,
                Some((_, _, best)) => iter < bland_after && d.abs() > best,
            };
            if better {
                entering = Some((v, dir, d.abs()));
            }
            if iter >= bland_after && entering.is_some() {
                break;
            }
        }
        let Some((v, dir, _)) = entering else { break };

        let a = column(v);
        let alpha = [inv[0][0] * a[0] + inv[0][1] * a[1], inv[1][0] * a[0] + inv[1][1] * a[1]];
        // Moving x_v by dir·t changes basic i by -dir·t·alpha_i.
        let mut step = upper(v);
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..2 {
            let rate = -dir * alpha[i];
            let bv = basis[i];
            let eps = 1e-15 * scale[i];
            let limit = if rate < -eps {
                Some(((x[bv]).max(0.0) / -rate, 0.0))
            } else if rate > eps && upper(bv).is_finite() {
                Some(((upper(bv) - x[bv]).max(0.0) / rate, upper(bv)))
            } else {
                None
            };
            if let Some((t, bound)) = limit {
                if t < step || (t == step && leave.is_some_and(|(li, _)| basis[i] < basis[li])) {
                    step = t;
                    leave = Some((i, bound));
                }
            }
        }
        if !step.is_finite() {
            break;
        }
        x[v] += dir * step;
        for i in 0..2 {
            x[basis[i]] -= dir * step * alpha[i];
        }
        if let Some((i, bound)) = leave {
            let out = basis[i];
            x[out] = bound;
            is_basic[out] = false;
            basis[i] = v;
            is_basic[v] = true;
        } else {
            x[v] = if dir > 0.0 { upper(v) } else { 0.0 };
        }
    }
    (0..n).filter(|&v| x[v] > 0.0).map(|v| (cols[v], x[v].clamp(0.0, 1.0))).collect()
}

/// Every non-empty set of `j`-large items (`w_i > μ·W*`) with total weight at most `W*`,
/// ordered by weight descending and then lexicographically by item index.
pub fn enumerate_configurations(
    capacity: f64,
    weights: &[f64],
    mu: f64,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    if !(mu > 0.0 && mu < 1.0) {
        return input_err(format!("mu must lie in (0, 1), got {mu}"));
    }
    let large: Vec<usize> = (0..weights.len())
        .filter(|&i| !leq(weights[i], mu * capacity) && leq(weights[i], capacity))
        .collect();
    let max_size = (1.0 / mu).floor() as usize;
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut stack = Vec::new();
    extend_configs(&large, weights, capacity, max_size, cap, 0, 0.0, &mut stack, &mut out)?;
    out.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    Ok(out.into_iter().map(|(_, s)| s).collect())
}

#[allow(clippy::too_many_arguments)]
fn extend_configs(
    large: &[usize],
    weights: &[f64],
    capacity: f64,
    max_size: usize,
    cap: usize,
    from: usize,
    load: f64,
    stack: &mut Vec<usize>,
    out: &mut Vec<(f64, Vec<usize>)>,
) -> Result<()> {
    if stack.len() == max_size {
        return Ok(());
    }
    for k in from..large.len() {
        let i = large[k];
        let next = load + weights[i];
        if !leq(next, capacity) {
            continue;
        }
        if out.len() >= cap {
            return Err(SmkpError::Capacity(format!(
                "more than {cap} configurations for a block of capacity {capacity}; \
                 raise mu or the configuration cap"
            )));
        }
        stack.push(i);
        out.push((next, stack.clone()));
        extend_configs(large, weights, capacity, max_size, cap, k + 1, next, stack, out)?;
        stack.pop();
    }
    Ok(())
}

/// The lifted instance `(E, P, g)` of a δ-restricted instance and a block partition of its
/// unrestricted bins.
#[derive(Debug, Clone)]
pub struct BlockInstance<'a, F> {
    pub restricted: &'a RestrictedInstance<F>,
    /// Unrestricted blocks first, then one singleton block per restricted bin.
    pub blocks: Vec<BlockSpec>,
    pub elements: Vec<Element>,
    pub polytope: BlockPolytope,
    pub lifted: LiftedOracle<&'a F>,
    pub mu: f64,
    index: HashMap<(usize, Vec<usize>), usize>,
}

impl<'a, F: SetFunction> BlockInstance<'a, F> {
    /// Number of unrestricted blocks.
    pub fn unrestricted_count(&self) -> usize {
        self.blocks.iter().filter(|b| !b.restricted).count()
    }

    /// Element with exactly this item set in this block, if any.
    pub fn element_index(&self, block: usize, items: &[usize]) -> Option<usize> {
        self.index.get(&(block, items.to_vec())).copied()
    }

    /// Translate a restricted-feasible assignment into an element set of the same `g` value:
    /// each unrestricted bin contributes its large items as one configuration and its small
    /// items as singletons, each restricted bin contributes singletons.
    pub fn lift_assignment(&self, assignment: &Assignment) -> Result<Vec<usize>> {
        let mut block_of_bin = HashMap::new();
        for (j, spec) in self.blocks.iter().enumerate() {
            for &b in &spec.bins {
                block_of_bin.insert(b, j);
            }
        }
        let weights = self.restricted.base.weights();
        let mut out = BTreeSet::new();
        for (b, items) in assignment.iter() {
            let Some(&j) = block_of_bin.get(&b) else {
                return input_err(format!("bin {b} belongs to no block"));
            };
            let spec = &self.blocks[j];
            let large: Vec<usize> = if spec.restricted {
                Vec::new()
            } else {
                items.iter().copied().filter(|&i| !leq(weights[i], self.mu * spec.capacity)).collect()
            };
            if !large.is_empty() {
                match self.element_index(j, &large) {
                    Some(e) => out.insert(e),
                    None => return input_err(format!("bin {b} holds no valid configuration")),
                };
            }
            for &i in items.iter().filter(|i| !large.contains(i)) {
                match self.element_index(j, &[i]) {
                    Some(e) => out.insert(e),
                    None => return input_err(format!("item {i} is not an element of block {j}")),
                };
            }
        }
        Ok(out.into_iter().collect())
    }

    /// JSON dump of `E` and `P` for debugging.
    pub fn diagnostics(&self) -> serde_json::Value {
        let base = &self.restricted.base;
        let blocks: Vec<_> = self
            .blocks
            .iter()
            .zip(self.polytope.bounds())
            .map(|(spec, bounds)| {
                json!({
                    "index": spec.index,
                    "bins": spec.bins.iter().map(|&b| base.bins[b].id.clone()).collect::<Vec<_>>(),
                    "capacity": spec.capacity,
                    "restricted": spec.restricted,
                    "count_bound": bounds.count,
                    "weight_bound": bounds.weight,
                })
            })
            .collect();
        let elements: Vec<_> = self
            .elements
            .iter()
            .map(|e| {
                json!({
                    "items": e.items.iter().map(|&i| base.items[i].id.clone()).collect::<Vec<_>>(),
                    "block": e.block,
                    "weight": e.weight,
                    "configuration": e.is_configuration,
                })
            })
            .collect();
        json!({ "mu": self.mu, "delta": self.restricted.delta, "blocks": blocks, "elements": elements })
    }
}

/// Build `(E, P, g)`.
///
/// `partition` lists the unrestricted bins block by block; each block must have one shared
/// capacity and together they must cover exactly the non-restricted bins.
pub fn build_block_instance<'a, F: SetFunction>(
    restricted: &'a RestrictedInstance<F>,
    partition: &[Vec<usize>],
    mu: f64,
    config_cap: usize,
) -> Result<BlockInstance<'a, F>> {
    if !(mu > 0.0 && mu < 1.0) {
        return input_err(format!("mu must lie in (0, 1), got {mu}"));
    }
    let base = &restricted.base;
    let m = base.bin_count();
    let mut covered = vec![false; m];
    let mut blocks = Vec::new();
    for part in partition {
        if part.is_empty() {
            return input_err("blocks must not be empty");
        }
        if let Some(&b) = part.iter().find(|&&b| b >= m) {
            return input_err(format!("block references unknown bin {b}"));
        }
        let capacity = base.bins[part[0]].capacity;
        for &b in part {
            if restricted.restricted.contains(&b) {
                return input_err(format!("restricted bin {b} cannot be part of a block"));
            }
            if covered[b] {
                return input_err(format!("bin {b} appears in two blocks"));
            }
            if base.bins[b].capacity != capacity {
                return input_err(format!("block mixes capacities {} and {capacity}", base.bins[b].capacity));
            }
            covered[b] = true;
        }
        let mut bins = part.clone();
        bins.sort_unstable();
        blocks.push(BlockSpec { index: blocks.len(), bins, capacity, restricted: false });
    }
    for &b in &restricted.restricted {
        covered[b] = true;
        blocks.push(BlockSpec {
            index: blocks.len(),
            bins: vec![b],
            capacity: base.bins[b].capacity,
            restricted: true,
        });
    }
    if let Some(b) = covered.iter().position(|c| !c) {
        return input_err(format!("bin {b} is neither restricted nor in a block"));
    }

    let weights = base.weights();
    let mut elements = Vec::new();
    for spec in &blocks {
        let w_star = spec.capacity;
        if !spec.restricted {
            for items in enumerate_configurations(w_star, &weights, mu, config_cap)? {
                let weight = items.iter().map(|&i| weights[i]).sum();
                elements.push(Element { items, block: spec.index, weight, is_configuration: true });
            }
        }
        let limit = if spec.restricted { restricted.delta * w_star } else { mu * w_star };
        for (i, &w) in weights.iter().enumerate() {
            if leq(w, limit) {
                elements.push(Element { items: vec![i], block: spec.index, weight: w, is_configuration: false });
            }
        }
    }

    let bounds = blocks
        .iter()
        .map(|spec| BlockBounds {
            count: (!spec.restricted).then_some(spec.size() as f64),
            weight: spec.size() as f64 * spec.capacity,
        })
        .collect();
    let columns = elements
        .iter()
        .map(|e| Column { block: e.block, weight: e.weight, counts: e.is_configuration })
        .collect();
    let polytope = BlockPolytope::new(bounds, columns)?;
    let lifted = LiftedOracle::new(&base.objective, elements.iter().map(|e| e.items.clone()).collect())?;
    let index = elements
        .iter()
        .enumerate()
        .map(|(k, e)| ((e.block, e.items.clone()), k))
        .collect();
    Ok(BlockInstance { restricted, blocks, elements, polytope, lifted, mu, index })
}
