//! Continuous greedy over the block polytope.
//!
//! Each step estimates `λ_e = ∂G/∂x_e`, the expected marginal `g(R ∪ {e}) - g(R)` over sampled
//! `R ~ x` that miss `e`, from one shared batch of sampled sets, asks the linear oracle for the best vertex `v` of `P`, and moves `x ← x + v / T`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::block::{linear_maximize, BlockPolytope, FractionalPoint};
use crate::error::{input_err, Result};
use crate::multilinear::sample_into;
use crate::numeric::derive_seed;
use crate::oracle::{LiftedOracle, SetFunction};

/// Samples handled by one worker task when estimating a gradient.
const CHUNK: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig {
    pub steps: usize,
    /// Sampled sets per gradient estimate, shared by all coordinates.
    pub samples: usize,
    pub seed: u64,
    /// Record the sampled `G(x)` at every step.
    pub track_value: bool,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        GreedyConfig { steps: 100, samples: 200, seed: 0, track_value: false }
    }
}

/// One line of the optional step trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyStep {
    pub step: usize,
    /// Sampled `G(x)` before the step (NaN unless value tracking is on).
    pub sampled_value: f64,
    /// Objective evaluations performed so far.
    pub oracle_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyOutcome {
    pub point: FractionalPoint,
    pub trace: Vec<GreedyStep>,
}

/// Sampled gradient `∂G/∂x_e` and (optionally) sampled value at `x`.
///
/// `∂G/∂x_e = E[g(R ∪ {e}) - g(R) | e ∉ R]`, so each coordinate averages the marginals of the
/// samples that miss `e`. When every sample contains `e` the derivative is taken from
/// `g(R) - g(R \ {e})` on the same samples instead.
///
/// Sample `s` of the batch draws from a generator seeded by `derive_seed(seed, s)`, and the
/// partial sums are combined in chunk order, so the result does not depend on thread count.
pub fn estimate_gradient<F: SetFunction>(
    g: &LiftedOracle<F>,
    x: &[f64],
    samples: usize,
    seed: u64,
    with_value: bool,
) -> (Vec<f64>, f64) {
    let dim = x.len();
    let chunks = samples.div_ceil(CHUNK);
    let draw = |s: usize, set: &mut Vec<usize>| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, s as u64));
        sample_into(x, &mut rng, set);
    };
    let partial: Vec<(Vec<f64>, Vec<u32>, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sum = vec![0.0; dim];
            let mut misses = vec![0u32; dim];
            let mut gains = vec![0.0; dim];
            let mut value = 0.0;
            let mut set = Vec::new();
            let mut inside = vec![false; dim];
            for s in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                draw(s, &mut set);
                g.element_gains(&set, &mut gains);
                set.iter().for_each(|&e| inside[e] = true);
                for e in 0..dim {
                    if !inside[e] {
                        sum[e] += gains[e];
                        misses[e] += 1;
                    }
                }
                set.iter().for_each(|&e| inside[e] = false);
                if with_value {
                    value += g.value(&set);
                }
            }
            (sum, misses, value)
        })
        .collect();
    let mut grad = vec![0.0; dim];
    let mut misses = vec![0u32; dim];
    let mut value = 0.0;
    for (sum, miss, v) in partial {
        for e in 0..dim {
            grad[e] += sum[e];
            misses[e] += miss[e];
        }
        value += v;
    }
    let saturated: Vec<usize> = (0..dim).filter(|&e| misses[e] == 0).collect();
    for e in 0..dim {
        if misses[e] > 0 {
            grad[e] /= misses[e] as f64;
        }
    }
    if !saturated.is_empty() {
        let mut set = Vec::new();
        let mut acc = vec![0.0; saturated.len()];
        for s in 0..samples {
            draw(s, &mut set);
            let full = g.value(&set);
            for (slot, &e) in acc.iter_mut().zip(&saturated) {
                let rest: Vec<usize> = set.iter().copied().filter(|&o| o != e).collect();
                *slot += full - g.value(&rest);
            }
        }
        for (&e, total) in saturated.iter().zip(acc) {
            grad[e] = total / samples as f64;
        }
    }
    (grad, value / samples as f64)
}

/// Approximately maximise the multilinear extension `G` of `g` over `P`.
///
/// The result is an average of `steps` points of `P` and therefore lies in `P`.
pub fn unified_greedy<F: SetFunction>(
    g: &LiftedOracle<F>,
    p: &BlockPolytope,
    cfg: &GreedyConfig,
) -> Result<GreedyOutcome> {
    if cfg.steps == 0 || cfg.samples == 0 {
        return input_err("greedy needs at least one step and one sample");
    }
    let dim = p.dimension();
    if g.ground_size() != dim {
        return input_err("lifted oracle and polytope disagree on the element count");
    }
    let mut x = vec![0.0; dim];
    let mut trace = Vec::new();
    let inv = 1.0 / cfg.steps as f64;
    for step in 0..cfg.steps {
        let (grad, value) = estimate_gradient(
            g,
            &x,
            cfg.samples,
            derive_seed(cfg.seed, step as u64),
            cfg.track_value,
        );
        if cfg.track_value {
            trace.push(GreedyStep { step, sampled_value: value, oracle_calls: g.evaluations() });
        }
        let v = linear_maximize(p, &grad)?;
        for (xi, vi) in x.iter_mut().zip(&v.values) {
            *xi = (*xi + inv * vi).min(1.0);
        }
    }
    Ok(GreedyOutcome { point: FractionalPoint { values: x }, trace })
}

/// `x̄* = (1 - μ)/(1 + μ) · ȳ*`.
pub fn scale_point(y: &FractionalPoint, mu: f64) -> Result<FractionalPoint> {
    if !(0.0..1.0).contains(&mu) {
        return input_err(format!("mu must lie in [0, 1), got {mu}"));
    }
    Ok(y.scaled((1.0 - mu) / (1.0 + mu)))
}
