//! Independent rounding of a fractional block solution, membership rejection, conversion of
//! element sets into bin assignments, and the failure-probability bound `γ`.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::block::{set_membership, BlockInstance, FractionalPoint};
use crate::error::{input_err, Result};
use crate::greedy::{scale_point, unified_greedy, GreedyConfig, GreedyStep};
use crate::instance::Assignment;
use crate::multilinear::{multilinear_sample, sample_into};
use crate::numeric::derive_seed;
use crate::oracle::SetFunction;

/// Draw `T ~ x`: each element independently with probability `x_e`.
pub fn sample_set(x: &FractionalPoint, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    sample_into(&x.values, &mut rng, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conversion {
    pub assignment: Assignment,
    /// `x^T ∈ (1 - μ)·P`, under which the assignment is guaranteed feasible.
    pub guaranteed: bool,
}

/// Place the elements of `T` into bins: heaviest first (configurations before singletons on
/// equal weight, then by item list), each into the currently lightest bin of its block
/// (lowest bin index on ties).
pub fn convert_block_solution<F: SetFunction>(bi: &BlockInstance<'_, F>, set: &[usize]) -> Conversion {
    let guaranteed = set_membership(set, &bi.polytope, 1.0 - bi.mu).inside;
    let weights = bi.restricted.base.weights();
    let mut order = set.to_vec();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (&bi.elements[a], &bi.elements[b]);
        eb.weight
            .total_cmp(&ea.weight)
            .then_with(|| eb.is_configuration.cmp(&ea.is_configuration))
            .then_with(|| ea.items.cmp(&eb.items))
            .then_with(|| ea.block.cmp(&eb.block))
    });
    order.dedup();
    let mut assignment = Assignment::new();
    for e in order {
        let el = &bi.elements[e];
        let bins = &bi.blocks[el.block].bins;
        let target = bins
            .iter()
            .copied()
            .min_by(|&a, &b| {
                assignment
                    .load(a, &weights)
                    .total_cmp(&assignment.load(b, &weights))
                    .then(a.cmp(&b))
            })
            .expect("blocks are non-empty");
        assignment.extend_bin(target, &el.items);
    }
    Conversion { assignment, guaranteed }
}

/// The three terms of `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaBound {
    /// `exp(-μ³/16 · OPT/υ)`.
    pub value_term: f64,
    /// `|B^r| · exp(-μ²/(12δ))`.
    pub restricted_term: f64,
    /// `2 Σ_j exp(-μ²|B_j|/12)` over unrestricted blocks.
    pub block_term: f64,
    pub total: f64,
    /// The `OPT` estimate the value term was computed with.
    pub opt_estimate: f64,
    pub upsilon: f64,
}

/// `γ = exp(-μ³/16·OPT/υ) + |B^r|·exp(-μ²/(12δ)) + 2·Σ_j exp(-μ²|B_j|/12)`.
///
/// A constant objective (`υ = 0`) has `OPT = 0`; the bound is then reported as 0.
pub fn compute_gamma(
    mu: f64,
    delta: f64,
    opt_estimate: f64,
    upsilon: f64,
    restricted_bins: usize,
    block_sizes: &[usize],
) -> GammaBound {
    if upsilon <= 0.0 {
        return GammaBound {
            value_term: 0.0,
            restricted_term: 0.0,
            block_term: 0.0,
            total: 0.0,
            opt_estimate,
            upsilon,
        };
    }
    let value_term = (-mu.powi(3) / 16.0 * opt_estimate / upsilon).exp();
    let restricted_term = restricted_bins as f64 * (-mu * mu / (12.0 * delta)).exp();
    let block_term: f64 = 2.0 * block_sizes.iter().map(|&s| (-mu * mu * s as f64 / 12.0).exp()).sum::<f64>();
    GammaBound {
        value_term,
        restricted_term,
        block_term,
        total: value_term + restricted_term + block_term,
        opt_estimate,
        upsilon,
    }
}

/// `υ = max_i f({i}) - f(∅)`.
pub fn upsilon<F: SetFunction>(f: &F) -> f64 {
    let empty = f.value(&[]);
    (0..f.ground_size()).map(|i| f.value(&[i]) - empty).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingConfig {
    pub greedy: GreedyConfig,
    pub repetitions: usize,
    /// `OPT` estimate for `γ`; the sampled `G(ȳ*)` is used when absent.
    pub opt_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub inside: bool,
    /// `g(T)` for accepted trials.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundOutcome {
    pub assignment: Assignment,
    pub value: f64,
    pub trials: Vec<TrialRecord>,
    /// Index of the trial whose assignment was returned.
    pub chosen: Option<usize>,
    pub membership_failures: usize,
    pub gamma: Option<GammaBound>,
    /// Sampled `G(ȳ*)`, when the greedy ran.
    pub fractional_value: Option<f64>,
    pub trace: Vec<GreedyStep>,
}

impl RoundOutcome {
    fn empty() -> Self {
        RoundOutcome {
            assignment: Assignment::new(),
            value: 0.0,
            trials: Vec::new(),
            chosen: None,
            membership_failures: 0,
            gamma: None,
            fractional_value: None,
            trace: Vec::new(),
        }
    }
}

/// Continuous greedy on `(E, P, g)`, scale by `(1-μ)/(1+μ)`, then `R` independent rounding
/// trials; trials outside `(1-μ)·P` are rejected and the best converted trial wins (earliest
/// on ties). Returns the empty assignment when every trial is rejected.
pub fn solve_and_round<F: SetFunction>(bi: &BlockInstance<'_, F>, cfg: &RoundingConfig) -> Result<RoundOutcome> {
    if cfg.repetitions == 0 {
        return input_err("solve_and_round needs at least one repetition");
    }
    let f = &bi.restricted.base.objective;
    let ups = upsilon(f);
    if bi.elements.is_empty() || ups <= 0.0 {
        return Ok(RoundOutcome::empty());
    }
    let greedy = unified_greedy(&bi.lifted, &bi.polytope, &cfg.greedy)?;
    let x = scale_point(&greedy.point, bi.mu)?;
    let g_y = multilinear_sample(&bi.lifted, &greedy.point.values, cfg.greedy.samples.max(2), derive_seed(cfg.greedy.seed, u64::MAX))?
        .mean;

    let round_seed = derive_seed(cfg.greedy.seed, u64::MAX - 1);
    let results: Vec<(TrialRecord, Option<Assignment>)> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|r| {
            let set = sample_set(&x, derive_seed(round_seed, r as u64));
            if !set_membership(&set, &bi.polytope, 1.0 - bi.mu).inside {
                return (TrialRecord { inside: false, value: None }, None);
            }
            let conv = convert_block_solution(bi, &set);
            let value = f.value(&conv.assignment.union());
            (TrialRecord { inside: true, value: Some(value) }, Some(conv.assignment))
        })
        .collect();

    let mut out = RoundOutcome::empty();
    out.fractional_value = Some(g_y);
    out.trace = greedy.trace;
    let restricted_bins = bi.blocks.iter().filter(|b| b.restricted).count();
    let sizes: Vec<usize> = bi.blocks.iter().filter(|b| !b.restricted).map(|b| b.size()).collect();
    let mu = bi.mu;
    out.gamma = Some(compute_gamma(
        mu,
        bi.restricted.delta,
        cfg.opt_estimate.unwrap_or(g_y),
        ups,
        restricted_bins,
        &sizes,
    ));
    for (r, (record, assignment)) in results.into_iter().enumerate() {
        match (record.value, assignment) {
            (Some(v), Some(a)) => {
                if out.chosen.is_none() || v.partial_cmp(&out.value) == Some(Ordering::Greater) {
                    out.value = v;
                    out.assignment = a;
                    out.chosen = Some(r);
                }
            }
            _ => out.membership_failures += 1,
        }
        out.trials.push(record);
    }
    Ok(out)
}
