//! Helpers shared by the integration suites: small instance builders, random oracles and
//! brute-force reference solvers written independently of the library.
#![allow(dead_code)]

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use smkp_core::generate::{generate_instance, CapacityProfile, GeneratorKind};
use smkp_core::{Assignment, Bin, Item, ObjectiveOracle, SetFunction, SmkpInstance};

pub fn inst(weights: &[f64], caps: &[f64], f: ObjectiveOracle) -> SmkpInstance {
    let items = weights.iter().enumerate().map(|(i, &w)| Item { id: format!("i{i:02}"), weight: w }).collect();
    let bins = caps.iter().enumerate().map(|(b, &c)| Bin { id: format!("b{b:02}"), capacity: c }).collect();
    SmkpInstance::new(items, bins, f).unwrap()
}

/// Modular, weighted coverage or group saturation over `n` items with small integer data.
pub fn random_oracle(rng: &mut ChaCha8Rng, n: usize) -> ObjectiveOracle {
    match rng.gen_range(0..3) {
        0 => ObjectiveOracle::modular((0..n).map(|_| rng.gen_range(0..=10) as f64).collect()).unwrap(),
        1 => {
            let u = rng.gen_range(1..=12);
            let weights = (0..u).map(|_| rng.gen_range(1..=9) as f64).collect();
            let covers = (0..n)
                .map(|_| {
                    let mut c: Vec<usize> = (0..u).filter(|_| rng.gen_bool(0.3)).collect();
                    c.dedup();
                    c
                })
                .collect();
            ObjectiveOracle::coverage(weights, covers).unwrap()
        }
        _ => {
            let g = rng.gen_range(1..=4);
            let caps = (0..g).map(|_| rng.gen_range(1..=15) as f64).collect();
            let mut contrib = Vec::with_capacity(n);
            for _ in 0..n {
                let mut row = Vec::new();
                for grp in 0..g {
                    if rng.gen_bool(0.5) {
                        row.push((grp, rng.gen_range(1..=8) as f64));
                    }
                }
                contrib.push(row);
            }
            ObjectiveOracle::saturation(caps, contrib).unwrap()
        }
    }
}

pub fn random_kind(rng: &mut ChaCha8Rng) -> GeneratorKind {
    [GeneratorKind::Coverage, GeneratorKind::Modular, GeneratorKind::GroupSaturation][rng.gen_range(0..3)]
}

pub fn random_profile(rng: &mut ChaCha8Rng) -> CapacityProfile {
    [CapacityProfile::Uniform, CapacityProfile::Geometric, CapacityProfile::Random][rng.gen_range(0..3)]
}

/// Generated instance with item and bin counts drawn from the given ranges.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    kind: GeneratorKind,
    items: RangeInclusive<usize>,
    bins: RangeInclusive<usize>,
) -> SmkpInstance {
    let n = rng.gen_range(items);
    let m = rng.gen_range(bins);
    let profile = random_profile(rng);
    generate_instance(kind, n, m, rng.gen(), profile).unwrap()
}

/// Items in random order, each into a random bin that still has room (or left out).
pub fn random_feasible_assignment<F: SetFunction>(rng: &mut ChaCha8Rng, instance: &SmkpInstance<F>) -> Assignment {
    let mut order: Vec<usize> = (0..instance.item_count()).collect();
    order.shuffle(rng);
    let mut loads = vec![0.0; instance.bin_count()];
    let mut out = Assignment::new();
    for i in order {
        if instance.bin_count() == 0 || rng.gen_bool(0.2) {
            continue;
        }
        let w = instance.items[i].weight;
        let start = rng.gen_range(0..instance.bin_count());
        for k in 0..instance.bin_count() {
            let b = (start + k) % instance.bin_count();
            if loads[b] + w <= instance.bins[b].capacity {
                loads[b] += w;
                out.insert(b, i);
                break;
            }
        }
    }
    out
}

/// `max λ·x` over `0 <= x <= 1`, `Σ_{counted} x <= count`, `Σ w·x <= cap`, by enumerating
/// basic solutions: pick which rows are tight, which variables are basic (one per tight row),
/// fix the others at 0 or 1 and solve for the basic ones.
pub fn brute_two_row_lp(weights: &[f64], counted: &[bool], count: Option<f64>, cap: f64, lambda: &[f64]) -> f64 {
    let n = weights.len();
    let a_count: Vec<f64> = counted.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
    let feasible = |x: &[f64]| {
        let tol = 1e-9;
        x.iter().all(|&v| (-tol..=1.0 + tol).contains(&v))
            && count.is_none_or(|c| a_count.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() <= c + tol * c.max(1.0))
            && weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() <= cap + tol * cap.max(1.0)
    };
    let mut rows: Vec<(Vec<f64>, f64)> = vec![(weights.to_vec(), cap)];
    if let Some(c) = count {
        rows.push((a_count.clone(), c));
    }
    let mut best = f64::NEG_INFINITY;
    let mut consider = |x: &[f64]| {
        if feasible(x) {
            let v: f64 = lambda.iter().zip(x).map(|(l, v)| l * v).sum();
            best = best.max(v);
        }
    };
    // Tight-row subsets of size 0, 1, 2.
    let mut tight_sets: Vec<Vec<usize>> = vec![vec![]];
    for r in 0..rows.len() {
        tight_sets.push(vec![r]);
    }
    if rows.len() == 2 {
        tight_sets.push(vec![0, 1]);
    }
    for tight in &tight_sets {
        let t = tight.len();
        let basics: Vec<Vec<usize>> = match t {
            0 => vec![vec![]],
            1 => (0..n).map(|i| vec![i]).collect(),
            _ => (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect(),
        };
        for basic in basics {
            let free: Vec<usize> = (0..n).filter(|i| !basic.contains(i)).collect();
            for mask in 0u32..(1 << free.len()) {
                let mut x = vec![0.0; n];
                for (k, &i) in free.iter().enumerate() {
                    x[i] = (mask >> k & 1) as f64;
                }
                // Solve the t×t system for the basic variables.
                let rhs: Vec<f64> = tight
                    .iter()
                    .map(|&r| rows[r].1 - free.iter().map(|&i| rows[r].0[i] * x[i]).sum::<f64>())
                    .collect();
                match t {
                    0 => consider(&x),
                    1 => {
                        let a = rows[tight[0]].0[basic[0]];
                        if a.abs() > 1e-12 {
                            x[basic[0]] = rhs[0] / a;
                            consider(&x);
                        }
                    }
                    _ => {
                        let (a, b) = (rows[tight[0]].0[basic[0]], rows[tight[0]].0[basic[1]]);
                        let (c, d) = (rows[tight[1]].0[basic[0]], rows[tight[1]].0[basic[1]]);
                        let det = a * d - b * c;
                        if det.abs() > 1e-12 {
                            x[basic[0]] = (rhs[0] * d - b * rhs[1]) / det;
                            x[basic[1]] = (a * rhs[1] - c * rhs[0]) / det;
                            consider(&x);
                        }
                    }
                }
            }
        }
    }
    best
}

/// All subsets of `0..n` as index lists.
pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}
