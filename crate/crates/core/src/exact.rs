//! Exhaustive branch-and-bound optimum for small instances.

use serde::Serialize;

use crate::error::{Result, SmkpError};
use crate::instance::{Assignment, RestrictedInstance, SmkpInstance};
use crate::numeric::leq;
use crate::oracle::SetFunction;

/// Largest `(m+1)^n` search space accepted.
pub const EXACT_SPACE_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSolution {
    pub assignment: Assignment,
    pub value: f64,
    /// Search nodes visited.
    pub nodes: u64,
}

struct Search<'a, F, A> {
    f: &'a F,
    weights: &'a [f64],
    caps: &'a [f64],
    allows: A,
    /// Items by weight, heaviest first.
    order: Vec<usize>,
    loads: Vec<f64>,
    placed: Vec<Option<usize>>,
    chosen: Vec<usize>,
    best_value: f64,
    best: Vec<Option<usize>>,
    nodes: u64,
}

impl<F: SetFunction, A: Fn(usize, usize) -> bool> Search<'_, F, A> {
    fn run(&mut self, depth: usize) {
        self.nodes += 1;
        if depth == self.order.len() {
            let v = self.f.value(&self.chosen);
            if v > self.best_value {
                self.best_value = v;
                self.best = self.placed.clone();
            }
            return;
        }
        // Monotone bound: nothing below can beat f(current ∪ every remaining item).
        let mut bound_set = self.chosen.clone();
        bound_set.extend_from_slice(&self.order[depth..]);
        if self.f.value(&bound_set) <= self.best_value {
            return;
        }
        let item = self.order[depth];
        let w = self.weights[item];
        for b in 0..self.caps.len() {
            if !(self.allows)(item, b) || !leq(self.loads[b] + w, self.caps[b]) {
                continue;
            }
            // Bins that look identical so far lead to the same subtrees; try only the first.
            let twin = (0..b).any(|e| {
                self.caps[e] == self.caps[b]
                    && self.loads[e] == self.loads[b]
                    && (self.allows)(item, e)
                    && self.equivalent(e, b)
            });
            if twin {
                continue;
            }
            self.loads[b] += w;
            self.placed[item] = Some(b);
            self.chosen.push(item);
            self.run(depth + 1);
            self.chosen.pop();
            self.placed[item] = None;
            self.loads[b] -= w;
        }
        self.run(depth + 1);
    }

    /// Same admission rule for every item still to be placed.
    fn equivalent(&self, a: usize, b: usize) -> bool {
        self.order.iter().all(|&i| (self.allows)(i, a) == (self.allows)(i, b))
    }
}

fn solve_with<F: SetFunction>(
    f: &F,
    weights: &[f64],
    caps: &[f64],
    allows: impl Fn(usize, usize) -> bool,
) -> Result<ExactSolution> {
    let (n, m) = (weights.len(), caps.len());
    let space = (m as f64 + 1.0).powi(n as i32);
    if space > EXACT_SPACE_LIMIT {
        return Err(SmkpError::Size(format!(
            "exact search over (m+1)^n = {space:.3e} assignments exceeds the limit of {EXACT_SPACE_LIMIT:e}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let mut search = Search {
        f,
        weights,
        caps,
        allows,
        order,
        loads: vec![0.0; m],
        placed: vec![None; n],
        chosen: Vec::with_capacity(n),
        best_value: f.value(&[]),
        best: vec![None; n],
        nodes: 0,
    };
    search.run(0);
    let mut assignment = Assignment::new();
    for (i, b) in search.best.iter().enumerate() {
        if let Some(b) = b {
            assignment.insert(*b, i);
        }
    }
    Ok(ExactSolution { assignment, value: search.best_value, nodes: search.nodes })
}

/// A true optimum; refuses instances with `(m+1)^n` above [`EXACT_SPACE_LIMIT`].
pub fn solve_exact<F: SetFunction>(instance: &SmkpInstance<F>) -> Result<ExactSolution> {
    solve_with(&instance.objective, &instance.weights(), &instance.capacities(), |_, _| true)
}

/// Optimum of a δ-restricted instance.
pub fn solve_exact_restricted<F: SetFunction>(instance: &RestrictedInstance<F>) -> Result<ExactSolution> {
    let base = &instance.base;
    solve_with(&base.objective, &base.weights(), &base.capacities(), |i, b| instance.allows(i, b))
}
