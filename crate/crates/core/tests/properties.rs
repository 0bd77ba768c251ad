mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use smkp_core::baseline::solve_greedy;
use smkp_core::block::{build_block_instance, linear_maximize, membership, set_membership};
use smkp_core::checks::check_submodular_monotone;
use smkp_core::exact::solve_exact;
use smkp_core::instance::{assignment_value, check_capacities, check_feasible, dedup_assignment};
use smkp_core::io::{assignment_from_ids, assignment_ids, instance_to_json, parse_instance};
use smkp_core::multilinear::multilinear_exact;
use smkp_core::pipeline::{leveled_setup, solve, PipelineParams};
use smkp_core::rounding::{convert_block_solution, sample_set};
use smkp_core::structuring::{structure_in_blocks, transform_assignment};
use smkp_core::{LiftedOracle, ResidualOracle, SetFunction};

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derived_oracles_stay_monotone_submodular(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=7);
        let f = random_oracle(&mut r, n);
        let anchor: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.3)).collect();
        let res = ResidualOracle::over_all_items(&f, anchor).unwrap();
        prop_assert!(check_submodular_monotone(&res, 10).unwrap().passed());
        let elements: Vec<Vec<usize>> =
            (0..r.gen_range(1..=6)).map(|_| (0..n).filter(|_| r.gen_bool(0.4)).collect()).collect();
        let lifted = LiftedOracle::new(&f, elements).unwrap();
        prop_assert!(check_submodular_monotone(&lifted, 10).unwrap().passed());
    }

    #[test]
    fn multilinear_at_indicator_is_set_value(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let f = random_oracle(&mut r, n);
        let set: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
        let x: Vec<f64> = (0..n).map(|i| if set.contains(&i) { 1.0 } else { 0.0 }).collect();
        let g = multilinear_exact(&f, &x).unwrap();
        prop_assert!((g - f.value(&set)).abs() <= 1e-9 * g.abs().max(1.0));
    }

    #[test]
    fn transform_keeps_leveled_feasibility_and_value(seed in any::<u64>(), n_level in 2usize..=4) {
        let mut r = rng(seed);
        let kind = random_kind(&mut r);
        let instance = random_instance(&mut r, kind, 1..=20, 1..=30);
        let a = dedup_assignment(&random_feasible_assignment(&mut r, &instance));
        let ids: Vec<&str> = instance.bins.iter().map(|b| b.id.as_str()).collect();
        let leveled = structure_in_blocks(&instance.capacities(), &ids, n_level).unwrap();
        let out = transform_assignment(&instance, &leveled, &a).unwrap();
        prop_assert!(check_capacities(&instance.weights(), &leveled.leveled_capacities(), &out).unwrap().feasible);
        let before = assignment_value(&instance, &a);
        let after = assignment_value(&instance, &out);
        prop_assert!(after >= (1.0 - 1.0 / n_level as f64) * before - 1e-9 * before.max(1.0));
        prop_assert!(out.union().iter().all(|i| a.union().contains(i)));
    }

    #[test]
    fn linear_oracle_returns_points_of_the_polytope(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kind = random_kind(&mut r);
        let instance = random_instance(&mut r, kind, 2..=10, 1..=8);
        let setup = leveled_setup(&instance, 2, r.gen_range(0.05..0.5)).unwrap();
        let bi = build_block_instance(&setup.restricted, &setup.partition, r.gen_range(0.05..0.5), 100_000).unwrap();
        let lambda: Vec<f64> = (0..bi.elements.len()).map(|_| r.gen_range(-1.0..5.0)).collect();
        let x = linear_maximize(&bi.polytope, &lambda).unwrap();
        prop_assert!(membership(&x, &bi.polytope, 1.0).unwrap().inside);
        prop_assert!(x.dot(&lambda) >= -1e-12);
    }

    #[test]
    fn accepted_samples_convert_to_feasible_assignments(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kind = random_kind(&mut r);
        let instance = random_instance(&mut r, kind, 2..=12, 1..=10);
        let setup = leveled_setup(&instance, 2, r.gen_range(0.05..0.5)).unwrap();
        let mu = r.gen_range(0.05..0.5);
        let bi = build_block_instance(&setup.restricted, &setup.partition, mu, 100_000).unwrap();
        let lambda: Vec<f64> = (0..bi.elements.len()).map(|_| r.gen_range(0.0..5.0)).collect();
        let x = linear_maximize(&bi.polytope, &lambda).unwrap().scaled((1.0 - mu) / (1.0 + mu));
        for t in 0..20 {
            let set = sample_set(&x, seed ^ t);
            if set_membership(&set, &bi.polytope, 1.0 - mu).inside {
                let conv = convert_block_solution(&bi, &set);
                prop_assert!(setup.restricted.check_feasible(&conv.assignment).unwrap().feasible);
            }
        }
    }

    #[test]
    fn baselines_are_feasible_and_bounded_by_optimum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kind = random_kind(&mut r);
        let instance = random_instance(&mut r, kind, 1..=7, 1..=3);
        let opt = solve_exact(&instance).unwrap();
        let greedy = solve_greedy(&instance);
        prop_assert!(check_feasible(&instance, &opt.assignment).unwrap().feasible);
        prop_assert!(check_feasible(&instance, &greedy.assignment).unwrap().feasible);
        prop_assert!(greedy.value <= opt.value + 1e-9 * opt.value.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pipeline_output_is_feasible_and_beats_single_items(seed in any::<u64>(), run_seed in 0u64..4) {
        let mut r = rng(seed);
        let kind = random_kind(&mut r);
        let instance = random_instance(&mut r, kind, 1..=8, 1..=3);
        let params = PipelineParams { seed: run_seed, xi: 1, ..PipelineParams::default() };
        let report = solve(&instance, &params).unwrap();
        prop_assert!(check_feasible(&instance, &report.assignment).unwrap().feasible);
        prop_assert!((assignment_value(&instance, &report.assignment) - report.value).abs() <= 1e-9 * report.value.max(1.0));
        let caps = instance.capacities();
        let best_single = (0..instance.item_count())
            .filter(|&i| caps.iter().any(|&c| instance.items[i].weight <= c))
            .map(|i| instance.objective.value(&[i]))
            .fold(0.0, f64::max);
        prop_assert!(report.value >= best_single - 1e-9 * best_single.max(1.0));
        let opt = solve_exact(&instance).unwrap().value;
        prop_assert!(report.value <= opt + 1e-9 * opt.max(1.0));
    }

    #[test]
    fn instance_and_assignment_survive_json(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kind = random_kind(&mut r);
        let instance = random_instance(&mut r, kind, 1..=8, 1..=4);
        let back = parse_instance(&instance_to_json(&instance)).unwrap();
        prop_assert_eq!(&back.items, &instance.items);
        prop_assert_eq!(&back.bins, &instance.bins);
        for s in subsets(instance.item_count()) {
            prop_assert!((back.objective.value(&s) - instance.objective.value(&s)).abs() <= 1e-12);
        }
        let a = random_feasible_assignment(&mut r, &instance);
        let ids = assignment_ids(&instance, &a);
        prop_assert_eq!(assignment_from_ids(&back, &ids).unwrap(), a);
    }
}
