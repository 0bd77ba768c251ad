//! Seeded random instance generation.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{input_err, Result, SmkpError};
use crate::instance::{Bin, Item, SmkpInstance};
use crate::oracle::{ObjectiveKind, ObjectiveOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Coverage,
    Modular,
    GroupSaturation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityProfile {
    /// All bins share one capacity.
    Uniform,
    /// Capacities halve from bin to bin (floored at 1/8 of the first).
    Geometric,
    /// Independent random shares.
    Random,
}

impl FromStr for GeneratorKind {
    type Err = SmkpError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coverage" | "weighted_coverage" => Ok(GeneratorKind::Coverage),
            "modular" => Ok(GeneratorKind::Modular),
            "group_saturation" | "saturation" => Ok(GeneratorKind::GroupSaturation),
            _ => input_err(format!("unknown instance kind {s:?}")),
        }
    }
}

impl FromStr for CapacityProfile {
    type Err = SmkpError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(CapacityProfile::Uniform),
            "geometric" => Ok(CapacityProfile::Geometric),
            "random" => Ok(CapacityProfile::Random),
            _ => input_err(format!("unknown capacity profile {s:?}")),
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Coverage => "coverage",
            GeneratorKind::Modular => "modular",
            GeneratorKind::GroupSaturation => "group_saturation",
        })
    }
}

impl fmt::Display for CapacityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CapacityProfile::Uniform => "uniform",
            CapacityProfile::Geometric => "geometric",
            CapacityProfile::Random => "random",
        })
    }
}

/// Zero-padded names so that lexicographic and numeric order agree.
fn names(prefix: &str, count: usize) -> Vec<String> {
    let width = count.saturating_sub(1).to_string().len().max(2);
    (0..count).map(|k| format!("{prefix}{k:0width$}")).collect()
}

fn capacities(rng: &mut ChaCha8Rng, total: f64, m: usize, profile: CapacityProfile) -> Vec<f64> {
    let shares: Vec<f64> = match profile {
        CapacityProfile::Uniform => vec![1.0; m],
        CapacityProfile::Geometric => (0..m).map(|b| 0.5f64.powi(b as i32).max(0.125)).collect(),
        CapacityProfile::Random => (0..m).map(|_| rng.gen_range(0.2..1.0)).collect(),
    };
    let sum: f64 = shares.iter().sum();
    // Whole-number capacities keep generated files readable; every bin can hold something.
    shares.iter().map(|s| (total * s / sum).round().max(1.0)).collect()
}

/// Random instance with integer weights in `[1, 100]` and total capacity about half the total
/// weight, so a typical optimum packs a sizeable fraction of the items.
pub fn generate_instance(
    kind: GeneratorKind,
    n: usize,
    m: usize,
    seed: u64,
    profile: CapacityProfile,
) -> Result<SmkpInstance> {
    if n == 0 || m == 0 {
        return input_err("generate_instance needs at least one item and one bin");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=100) as f64).collect();
    let total: f64 = weights.iter().sum();
    let caps = capacities(&mut rng, 0.5 * total, m, profile);

    let objective = match kind {
        GeneratorKind::Modular => {
            ObjectiveKind::Modular { values: (0..n).map(|_| rng.gen_range(1..=100) as f64).collect() }
        }
        GeneratorKind::Coverage => {
            let u = (2 * n).max(4);
            let universe = names("u", u)
                .into_iter()
                .map(|name| (name, rng.gen_range(1..=10) as f64))
                .collect();
            let covers = (0..n)
                .map(|_| {
                    let k = rng.gen_range(1..=4.min(u));
                    let mut row = sample(&mut rng, u, k).into_vec();
                    row.sort_unstable();
                    row
                })
                .collect();
            ObjectiveKind::WeightedCoverage { universe, covers }
        }
        GeneratorKind::GroupSaturation => {
            let g = (n / 3).max(2);
            let contrib: Vec<Vec<(usize, f64)>> = (0..n)
                .map(|_| {
                    let k = rng.gen_range(1..=2);
                    let mut row: Vec<(usize, f64)> = sample(&mut rng, g, k)
                        .into_iter()
                        .map(|grp| (grp, rng.gen_range(1..=20) as f64))
                        .collect();
                    row.sort_by_key(|&(grp, _)| grp);
                    row
                })
                .collect();
            let mut totals = vec![0.0; g];
            for &(grp, v) in contrib.iter().flatten() {
                totals[grp] += v;
            }
            let groups = names("g", g)
                .into_iter()
                .zip(&totals)
                .map(|(name, &t)| (name, (0.6 * t).round()))
                .collect();
            ObjectiveKind::GroupSaturation { groups, contrib }
        }
    };

    let items = names("i", n)
        .into_iter()
        .zip(weights)
        .map(|(id, weight)| Item { id, weight })
        .collect();
    let bins = names("b", m)
        .into_iter()
        .zip(caps)
        .map(|(id, capacity)| Bin { id, capacity })
        .collect();
    SmkpInstance::new(items, bins, ObjectiveOracle::new(objective)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{instance_to_json, parse_instance};

    #[test]
    fn smallest_instance() {
        let inst = generate_instance(GeneratorKind::Modular, 1, 1, 5, CapacityProfile::Uniform).unwrap();
        assert_eq!((inst.item_count(), inst.bin_count()), (1, 1));
        assert!(inst.bins[0].capacity >= 1.0);
    }

    #[test]
    fn deterministic_serialization() {
        for kind in [GeneratorKind::Coverage, GeneratorKind::Modular, GeneratorKind::GroupSaturation] {
            for profile in [CapacityProfile::Uniform, CapacityProfile::Geometric, CapacityProfile::Random] {
                let a = generate_instance(kind, 9, 3, 17, profile).unwrap();
                let b = generate_instance(kind, 9, 3, 17, profile).unwrap();
                assert_eq!(instance_to_json(&a), instance_to_json(&b));
                assert_eq!(parse_instance(&instance_to_json(&a)).unwrap(), a);
            }
        }
    }

    #[test]
    fn weights_in_range() {
        let inst = generate_instance(GeneratorKind::Coverage, 50, 4, 3, CapacityProfile::Random).unwrap();
        assert!(inst.items.iter().all(|i| (1.0..=100.0).contains(&i.weight)));
    }

    #[test]
    fn parse_names() {
        assert_eq!("coverage".parse::<GeneratorKind>().unwrap(), GeneratorKind::Coverage);
        assert!("nope".parse::<CapacityProfile>().is_err());
    }
}
