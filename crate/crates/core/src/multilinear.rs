//! Exact and sampled evaluation of the multilinear extension
//! `F(x) = E_{X ~ x}[f(X)]`, where `X` contains each item independently with probability `x_i`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result, SmkpError};
use crate::oracle::SetFunction;

/// Largest ground set accepted by [`multilinear_exact`].
pub const EXACT_LIMIT: usize = 20;

/// Samples drawn per worker chunk in [`multilinear_sample`].
const CHUNK: usize = 256;

/// Monte-Carlo estimate of `F(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultilinearEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by `sqrt(sample_count)`.
    pub standard_error: f64,
    pub sample_count: usize,
    pub seed: u64,
}

fn check_point(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return input_err(format!("point has {} coordinates, ground set has {n}", x.len()));
    }
    if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return input_err("point coordinates must lie in [0, 1]");
    }
    Ok(())
}

/// Draw `X ~ x` into `out` (cleared first).
pub fn sample_into<R: Rng>(x: &[f64], rng: &mut R, out: &mut Vec<usize>) {
    out.clear();
    for (i, &p) in x.iter().enumerate() {
        if p > 0.0 && rng.gen::<f64>() < p {
            out.push(i);
        }
    }
}

/// `F(x)` by enumerating all `2^n` subsets.
pub fn multilinear_exact<F: SetFunction + ?Sized>(f: &F, x: &[f64]) -> Result<f64> {
    let n = f.ground_size();
    if n > EXACT_LIMIT {
        return Err(SmkpError::Size(format!(
            "exact multilinear extension limited to {EXACT_LIMIT} items (got {n}); use multilinear_sample"
        )));
    }
    check_point(x, n)?;
    let mut total = 0.0;
    let mut set = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        let mut prob = 1.0;
        set.clear();
        for (i, &p) in x.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prob *= p;
                set.push(i);
            } else {
                prob *= 1.0 - p;
            }
        }
        if prob > 0.0 {
            total += prob * f.value(&set);
        }
    }
    Ok(total)
}

/// Unbiased Monte-Carlo estimate of `F(x)`.
///
/// Samples are split into fixed chunks; chunk `w` draws from a generator seeded with
/// `seed ^ w`, so the estimate does not depend on how many threads run the chunks.
pub fn multilinear_sample<F: SetFunction + ?Sized>(
    f: &F,
    x: &[f64],
    sample_count: usize,
    seed: u64,
) -> Result<MultilinearEstimate> {
    if sample_count < 2 {
        return input_err("multilinear_sample needs at least 2 samples");
    }
    check_point(x, f.ground_size())?;
    let chunks = sample_count.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|w| {
            let count = CHUNK.min(sample_count - w * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ w as u64);
            let mut set = Vec::new();
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                sample_into(x, &mut rng, &mut set);
                let v = f.value(&set);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial.iter().fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
    let k = sample_count as f64;
    let mean = sum / k;
    let var = ((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0);
    Ok(MultilinearEstimate { mean, standard_error: (var / k).sqrt(), sample_count, seed })
}
