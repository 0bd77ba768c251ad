//! Density-greedy baseline with a best-single-item fallback.

use serde::Serialize;

use crate::instance::{Assignment, SmkpInstance};
use crate::numeric::leq;
use crate::oracle::SetFunction;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedySolution {
    pub assignment: Assignment,
    pub value: f64,
    /// Value of the density-greedy packing alone.
    pub greedy_value: f64,
    /// Value of the best item that fits some bin on its own.
    pub single_value: f64,
}

/// Marginal gain per unit weight; zero-weight items with positive gain rank first.
fn density(gain: f64, weight: f64) -> f64 {
    if weight > 0.0 {
        gain / weight
    } else if gain > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Repeatedly insert the fitting `(item, bin)` pair of highest marginal density (ties: larger
/// marginal, then smaller `(item, bin)`), stop when no fitting pair gains anything, and return
/// the better of that packing and the best single fitting item.
pub fn solve_greedy<F: SetFunction>(instance: &SmkpInstance<F>) -> GreedySolution {
    let f = &instance.objective;
    let weights = instance.weights();
    let caps = instance.capacities();
    let n = weights.len();
    let mut loads = vec![0.0; caps.len()];
    let mut used = vec![false; n];
    let mut chosen: Vec<usize> = Vec::new();
    let mut assignment = Assignment::new();
    let mut gains = vec![0.0; n];
    let singles: Vec<[usize; 1]> = (0..n).map(|i| [i]).collect();
    let candidates: Vec<&[usize]> = singles.iter().map(|s| s.as_slice()).collect();
    loop {
        f.gains(&chosen, &candidates, &mut gains);
        let mut best: Option<(f64, f64, usize, usize)> = None;
        for i in (0..n).filter(|&i| !used[i] && gains[i] > 0.0) {
            let Some(b) = (0..caps.len()).find(|&b| leq(loads[b] + weights[i], caps[b])) else {
                continue;
            };
            let key = (density(gains[i], weights[i]), gains[i]);
            let better = match best {
                None => true,
                Some((d, g, _, _)) => key.0 > d || (key.0 == d && key.1 > g),
            };
            if better {
                best = Some((key.0, key.1, i, b));
            }
        }
        let Some((_, _, i, b)) = best else { break };
        used[i] = true;
        chosen.push(i);
        loads[b] += weights[i];
        assignment.insert(b, i);
    }
    let greedy_value = f.value(&chosen);

    let mut single: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        if let Some(b) = (0..caps.len()).find(|&b| leq(weights[i], caps[b])) {
            let v = f.value(&[i]);
            if single.is_none_or(|(s, _, _)| v > s) {
                single = Some((v, i, b));
            }
        }
    }
    match single {
        Some((v, i, b)) if v > greedy_value => GreedySolution {
            assignment: Assignment::from_bins([(b, vec![i])]),
            value: v,
            greedy_value,
            single_value: v,
        },
        _ => GreedySolution {
            assignment,
            value: greedy_value,
            greedy_value,
            single_value: single.map_or(f.value(&[]), |s| s.0),
        },
    }
}
