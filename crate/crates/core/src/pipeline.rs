//! The end-to-end solver.
//!
//! Every feasible partial assignment with at most `ξ` placements is tried as a fixed prefix.
//! The rest of each branch is a residual instance (remaining capacity, marginal objective,
//! only items whose marginal is at most `f(A)/ξ`), which is leveled into blocks, relaxed into
//! the block polytope, solved by continuous greedy and rounded. The best branch wins.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::block::{build_block_instance, DEFAULT_CONFIG_CAP};
use crate::error::{input_err, Result, SmkpError};
use crate::greedy::GreedyConfig;
use crate::instance::{check_feasible, Assignment, Bin, Item, RestrictedInstance, SmkpInstance};
use crate::numeric::{derive_seed, leq, mix64};
use crate::oracle::{ResidualOracle, SetFunction};
use crate::rounding::{solve_and_round, GammaBound, RoundingConfig};
use crate::structuring::{structure_in_blocks, LeveledStructure};

/// Default cap on the number of enumerated partial assignments.
pub const DEFAULT_MAX_BRANCHES: u64 = 1_000_000;

/// Largest `ε` accepted by [`compute_paper_parameters`].
pub const MAX_PAPER_EPSILON: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Parameters chosen freely for desk-scale runs.
    Practical,
    /// Parameters derived from `ε` so that the approximation guarantee applies.
    PaperFaithful,
}

impl FromStr for Mode {
    type Err = SmkpError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "practical" => Ok(Mode::Practical),
            "paper-faithful" | "paper_faithful" => Ok(Mode::PaperFaithful),
            _ => input_err(format!("unknown mode {s:?} (expected practical or paper-faithful)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Practical => "practical",
            Mode::PaperFaithful => "paper-faithful",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub epsilon: Option<f64>,
    /// Enumeration size `ξ`.
    pub xi: u64,
    /// Leveling base `N`.
    pub leveling_n: usize,
    /// Smallness `δ` of items admitted to restricted bins.
    pub delta: f64,
    /// Rounding slack `μ`.
    pub mu: f64,
    pub mode: Mode,
    pub greedy: GreedyConfig,
    /// Rounding trials `R` per branch.
    pub repetitions: usize,
    pub seed: u64,
    pub max_branches: u64,
    pub config_cap: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            epsilon: None,
            xi: 2,
            leveling_n: 2,
            delta: 0.25,
            mu: 0.1,
            mode: Mode::Practical,
            greedy: GreedyConfig::default(),
            repetitions: 30,
            seed: 0,
            max_branches: DEFAULT_MAX_BRANCHES,
            config_cap: DEFAULT_CONFIG_CAP,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        if self.leveling_n < 2 {
            return input_err(format!("leveling base N must be at least 2, got {}", self.leveling_n));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return input_err(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return input_err(format!("mu must lie in (0, 1), got {}", self.mu));
        }
        if self.repetitions == 0 {
            return input_err("repetitions must be at least 1");
        }
        if self.greedy.steps == 0 || self.greedy.samples == 0 {
            return input_err("greedy steps and samples must be at least 1");
        }
        if self.mode == Mode::PaperFaithful {
            let Some(eps) = self.epsilon else {
                return input_err("paper-faithful mode needs epsilon");
            };
            // A saturated ξ stands for a value beyond u64; it satisfies every lower bound.
            let xi = if self.xi == u64::MAX { f64::INFINITY } else { self.xi as f64 };
            paper_relations(eps, self.mu, self.leveling_n as f64, self.delta, xi)
                .map_err(SmkpError::Input)?;
        }
        Ok(())
    }
}

/// Parameters derived from `ε`, with the intermediate quantities kept for reporting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperParameters {
    pub epsilon: f64,
    pub mu: f64,
    pub leveling_n: u64,
    pub delta: f64,
    /// `ξ`, saturated at `u64::MAX`.
    pub xi: u64,
    /// `ξ` before rounding and saturation.
    pub xi_real: f64,
    /// `2N²·Σ_{t≥1} exp(-μ²N^t/12)` at the chosen `N`.
    pub block_tail: f64,
}

impl PaperParameters {
    /// Overwrite `ξ, N, δ, μ` and the mode of `params`.
    pub fn apply(&self, params: &mut PipelineParams) {
        params.epsilon = Some(self.epsilon);
        params.mu = self.mu;
        params.leveling_n = usize::try_from(self.leveling_n).unwrap_or(usize::MAX);
        params.delta = self.delta;
        params.xi = self.xi;
        params.mode = Mode::PaperFaithful;
    }

    /// Human-readable magnitude warning.
    pub fn warning(&self) -> String {
        let mut msg = format!(
            "paper-faithful parameters for epsilon={}: mu={:.6e}, N={}, delta={:.6e}, xi={:.6e}",
            self.epsilon, self.mu, self.leveling_n, self.delta, self.xi_real
        );
        if self.epsilon >= 0.1 {
            msg.push_str("; epsilon >= 0.1 lies outside the range where the guarantee is stated");
        }
        msg
    }
}

/// `(1-μ)³/(1+μ)`, decreasing on `[0, 1)`.
fn slack_factor(mu: f64) -> f64 {
    (1.0 - mu).powi(3) / (1.0 + mu)
}

/// `2N²·Σ_{t≥1} exp(-a·N^t)`, stopping once a term drops below `1e-18`.
fn block_tail(n: f64, a: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = n;
    loop {
        let term = (-a * power).exp();
        sum += term;
        if term < 1e-18 || !power.is_finite() {
            break;
        }
        power *= n;
    }
    2.0 * n * n * sum
}

/// Check the four relations tying `ξ, N, δ, μ` to `ε`.
pub fn paper_relations(eps: f64, mu: f64, n: f64, delta: f64, xi: f64) -> std::result::Result<(), String> {
    let e2 = eps * eps;
    if !(mu > 0.0 && mu < 0.1) || slack_factor(mu) < 1.0 - e2 {
        return Err(format!("mu={mu} violates (1-mu)^3/(1+mu) >= 1-eps^2 with mu in (0, 0.1)"));
    }
    if n <= 1.0 / e2 {
        return Err(format!("N={n} is not above 1/eps^2"));
    }
    let a = mu * mu / 12.0;
    let tail = n * n * (-a / delta).exp() + block_tail(n, a);
    if !(tail < e2 / 2.0) {
        return Err(format!("N={n}, delta={delta} leave a concentration tail {tail:e} >= eps^2/2"));
    }
    if xi < n * n / (e2 * delta) || (-mu.powi(3) * xi / 80.0).exp() > e2 / 2.0 {
        return Err(format!("xi={xi} is below the required enumeration size"));
    }
    Ok(())
}

/// Derive `μ, N, δ, ξ` from `ε`.
///
/// * `μ`: the largest value in `(0, 0.1)` with `(1-μ)³/(1+μ) >= 1-ε²`, found by bisection;
/// * `N`: the smallest integer above `1/ε²` with `2N²·Σ_t exp(-μ²N^t/12) < ε²/2`;
/// * `δ`: just below the value where `N²·exp(-μ²/(12δ))` uses up the rest of `ε²/2`;
/// * `ξ`: the smallest integer with `ξ >= N²/(ε²δ)` and `exp(-μ³ξ/80) <= ε²/2`.
pub fn compute_paper_parameters(eps: f64) -> Result<PaperParameters> {
    if !(eps > 0.0 && eps <= MAX_PAPER_EPSILON) {
        return input_err(format!("epsilon must lie in (0, {MAX_PAPER_EPSILON}], got {eps}"));
    }
    let e2 = eps * eps;
    let target = 1.0 - e2;
    let (mut lo, mut hi) = (0.0f64, 0.1f64);
    if slack_factor(hi) >= target {
        lo = hi * (1.0 - 1e-12);
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if slack_factor(mid) >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let mu = lo;
    let a = mu * mu / 12.0;
    let budget = e2 / 2.0;

    // Below 2/a the first tail term N²·exp(-aN) is at least 2N²e⁻² > ε²/2 for every N > 1/ε²
    // (ε <= 0.5), so the search starts where the tail is decreasing.
    let floor = (1.0 / e2).floor() + 1.0;
    let start = floor.max((2.0 / a).ceil());
    let mut high = start;
    while block_tail(high, a) >= budget {
        high *= 2.0;
    }
    let mut low = start;
    if block_tail(low, a) >= budget {
        // Invariant: tail(low) >= budget > tail(high).
        while high - low > 1.0 {
            let mid = (0.5 * (low + high)).floor();
            if block_tail(mid, a) >= budget {
                low = mid;
            } else {
                high = mid;
            }
        }
    } else {
        high = low;
    }
    let n = high;
    let tail = block_tail(n, a);
    let rest = budget - tail;
    let delta = a / (n * n / rest).ln() * (1.0 - 1e-6);
    let xi_real = (n * n / (e2 * delta)).max(80.0 * (2.0 / e2).ln() / mu.powi(3)).ceil();
    Ok(PaperParameters {
        epsilon: eps,
        mu,
        leveling_n: n as u64,
        delta,
        xi: xi_real as u64,
        xi_real,
        block_tail: tail,
    })
}

/// Residual instance together with the map back to the original items.
pub struct ResidualInstance<'a, F> {
    pub instance: SmkpInstance<ResidualOracle<&'a F>>,
    /// Residual item index → original item index.
    pub item_map: Vec<usize>,
    /// `f(A)/ξ`.
    pub threshold: f64,
}

/// Fix `partial`: capacities shrink by the fixed load, the objective becomes `f_A`, and only
/// items outside `A` with `f_A({i}) <= f(A)/ξ` remain.
pub fn residual_instance<'a, F: SetFunction>(
    instance: &'a SmkpInstance<F>,
    partial: &Assignment,
    xi: u64,
) -> Result<ResidualInstance<'a, F>> {
    if xi == 0 {
        return input_err("residual instance needs xi >= 1");
    }
    if !check_feasible(instance, partial)?.feasible {
        return input_err("partial assignment is not feasible");
    }
    let f = &instance.objective;
    let anchor = partial.union();
    let threshold = f.value(&anchor) / xi as f64;
    let n = instance.item_count();
    let mut fixed = vec![false; n];
    anchor.iter().for_each(|&i| fixed[i] = true);
    let free: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
    let singles: Vec<[usize; 1]> = free.iter().map(|&i| [i]).collect();
    let candidates: Vec<&[usize]> = singles.iter().map(|s| s.as_slice()).collect();
    let mut gains = vec![0.0; free.len()];
    f.gains(&anchor, &candidates, &mut gains);
    let item_map: Vec<usize> =
        free.iter().zip(&gains).filter(|&(_, &g)| leq(g, threshold)).map(|(&i, _)| i).collect();

    let weights = instance.weights();
    let items = item_map.iter().map(|&i| instance.items[i].clone()).collect::<Vec<Item>>();
    let bins = instance
        .bins
        .iter()
        .enumerate()
        .map(|(b, bin)| Bin { id: bin.id.clone(), capacity: (bin.capacity - partial.load(b, &weights)).max(0.0) })
        .collect();
    let objective = ResidualOracle::new(f, anchor, item_map.clone())?;
    Ok(ResidualInstance { instance: SmkpInstance::new(items, bins, objective)?, item_map, threshold })
}

/// Every feasible assignment with at most `ξ` placements, each exactly once, starting with the
/// empty one. Items are decided in index order (skip first, then bins in index order).
///
/// Fails with a size error once more than `limit` assignments would be produced.
pub fn enumerate_partials<F: SetFunction>(
    instance: &SmkpInstance<F>,
    xi: u64,
    limit: u64,
) -> Result<Vec<Assignment>> {
    struct Walk<'a> {
        weights: &'a [f64],
        caps: &'a [f64],
        loads: Vec<f64>,
        current: Vec<(usize, usize)>,
        out: Vec<Assignment>,
        limit: u64,
    }
    impl Walk<'_> {
        fn emit(&mut self) -> Result<()> {
            if self.out.len() as u64 >= self.limit {
                return Err(SmkpError::Size(format!(
                    "more than {} partial assignments to enumerate",
                    self.limit
                )));
            }
            let mut a = Assignment::new();
            for &(b, i) in &self.current {
                a.insert(b, i);
            }
            self.out.push(a);
            Ok(())
        }

        fn go(&mut self, from: usize, budget: u64) -> Result<()> {
            if budget == 0 {
                return Ok(());
            }
            for i in from..self.weights.len() {
                for b in 0..self.caps.len() {
                    if !leq(self.loads[b] + self.weights[i], self.caps[b]) {
                        continue;
                    }
                    self.loads[b] += self.weights[i];
                    self.current.push((b, i));
                    self.emit()?;
                    self.go(i + 1, budget - 1)?;
                    self.current.pop();
                    self.loads[b] -= self.weights[i];
                }
            }
            Ok(())
        }
    }
    let weights = instance.weights();
    let caps = instance.capacities();
    let mut walk = Walk {
        weights: &weights,
        caps: &caps,
        loads: vec![0.0; caps.len()],
        current: Vec::new(),
        out: Vec::new(),
        limit,
    };
    walk.emit()?;
    walk.go(0, xi)?;
    Ok(walk.out)
}

/// Seed of a branch, derived from the partial assignment itself so it does not depend on
/// scheduling.
pub fn branch_seed(seed: u64, partial: &Assignment) -> u64 {
    let mut h = mix64(partial.placements() as u64);
    for (b, items) in partial.iter() {
        h = mix64(h ^ mix64(b as u64 ^ 0xB1B1_0000_0000_0000));
        for &i in items {
            h = mix64(h ^ i as u64);
        }
    }
    derive_seed(seed, h)
}

/// Per-branch summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchRecord {
    pub partial: Assignment,
    pub partial_value: f64,
    pub residual_items: usize,
    /// Bins kept by the leveling (0 when the residual instance is empty).
    pub surviving_bins: usize,
    /// Number of blocks `k + 1`.
    pub blocks: usize,
    pub restricted_bins: usize,
    /// `|E|`.
    pub elements: usize,
    pub value: f64,
    pub fractional_value: Option<f64>,
    pub gamma: Option<GammaBound>,
    pub trials: usize,
    pub membership_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub value: f64,
    pub assignment: Assignment,
    pub branches: Vec<BranchRecord>,
    pub best_branch: usize,
    pub oracle_calls: u64,
    pub runtime_ms: u64,
    pub seed: u64,
    /// `γ` of the winning branch, when it ran the rounding step.
    pub gamma: Option<GammaBound>,
    /// Rounding trials over all branches.
    pub trials: usize,
    pub membership_failures: usize,
}

/// A leveled instance ready for the block relaxation.
pub struct LeveledSetup<F> {
    pub leveled: LeveledStructure,
    /// Surviving bins (by position) with reduced capacities; blocks `0..=min(N²-1, k)` are
    /// restricted.
    pub restricted: RestrictedInstance<F>,
    /// Bin positions of blocks `N²..=k`.
    pub partition: Vec<Vec<usize>>,
}

/// Level the bins of `instance` and split the blocks into restricted singletons and the
/// unrestricted partition. Bin `p` of the result is the bin at sorted position `p`.
pub fn leveled_setup<F: SetFunction>(
    instance: &SmkpInstance<F>,
    n: usize,
    delta: f64,
) -> Result<LeveledSetup<&F>> {
    let caps = instance.capacities();
    let ids: Vec<&str> = instance.bins.iter().map(|b| b.id.as_str()).collect();
    let leveled = structure_in_blocks(&caps, &ids, n)?;
    let bins = leveled
        .surviving_bins()
        .iter()
        .zip(&leveled.reduced)
        .map(|(&b, &capacity)| Bin { id: ids[b].to_string(), capacity })
        .collect();
    let sub = SmkpInstance::new(instance.items.clone(), bins, &instance.objective)?;
    let nn = n.saturating_mul(n);
    let last_restricted = (nn - 1).min(leveled.k());
    let restricted: BTreeSet<usize> = leveled.blocks[..=last_restricted].iter().flat_map(|r| r.clone()).collect();
    let partition = leveled.blocks.iter().skip(nn).map(|r| r.clone().collect()).collect();
    let restricted = RestrictedInstance::new(sub, restricted, delta)?;
    Ok(LeveledSetup { leveled, restricted, partition })
}

fn solve_branch<F: SetFunction>(
    instance: &SmkpInstance<F>,
    partial: &Assignment,
    params: &PipelineParams,
) -> Result<(BranchRecord, Assignment)> {
    let res = residual_instance(instance, partial, params.xi.max(1))?;
    let mut record = BranchRecord {
        partial: partial.clone(),
        partial_value: instance.objective.value(&partial.union()),
        residual_items: res.instance.item_count(),
        surviving_bins: 0,
        blocks: 0,
        restricted_bins: 0,
        elements: 0,
        value: 0.0,
        fractional_value: None,
        gamma: None,
        trials: 0,
        membership_failures: 0,
    };
    let mut candidate = partial.clone();
    if res.instance.item_count() > 0 && res.instance.bin_count() > 0 {
        let setup = leveled_setup(&res.instance, params.leveling_n, params.delta)?;
        let rinst = &setup.restricted;
        record.surviving_bins = setup.leveled.surviving_count();
        record.blocks = setup.leveled.blocks.len();
        record.restricted_bins = rinst.restricted.len();
        let bi = build_block_instance(rinst, &setup.partition, params.mu, params.config_cap)?;
        record.elements = bi.elements.len();
        let cfg = RoundingConfig {
            greedy: GreedyConfig { seed: branch_seed(params.seed, partial), ..params.greedy.clone() },
            repetitions: params.repetitions,
            opt_estimate: None,
        };
        let out = solve_and_round(&bi, &cfg)?;
        record.fractional_value = out.fractional_value;
        record.gamma = out.gamma;
        record.trials = out.trials.len();
        record.membership_failures = out.membership_failures;
        candidate = candidate.merged(&out.assignment.remap(setup.leveled.surviving_bins(), &res.item_map));
    }
    let verdict = check_feasible(instance, &candidate)?;
    if !verdict.feasible {
        return Err(SmkpError::Internal(format!("branch produced an infeasible packing: {:?}", verdict.violation)));
    }
    record.value = instance.objective.value(&candidate.union());
    Ok((record, candidate))
}

/// Run every branch and keep the best packing (earliest branch on ties).
pub fn solve<F: SetFunction>(instance: &SmkpInstance<F>, params: &PipelineParams) -> Result<SolveReport> {
    params.validate()?;
    let start = Instant::now();
    let calls_before = instance.objective.evaluations();
    let partials = enumerate_partials(instance, params.xi, params.max_branches)?;
    let results: Vec<(BranchRecord, Assignment)> =
        partials.par_iter().map(|p| solve_branch(instance, p, params)).collect::<Result<_>>()?;

    let mut best = 0;
    for (k, (record, _)) in results.iter().enumerate() {
        if record.value > results[best].0.value {
            best = k;
        }
    }
    let trials = results.iter().map(|(r, _)| r.trials).sum();
    let membership_failures = results.iter().map(|(r, _)| r.membership_failures).sum();
    let (branches, mut candidates): (Vec<BranchRecord>, Vec<Assignment>) = results.into_iter().unzip();
    Ok(SolveReport {
        value: branches[best].value,
        assignment: std::mem::take(&mut candidates[best]),
        gamma: branches[best].gamma,
        best_branch: best,
        branches,
        oracle_calls: instance.objective.evaluations() - calls_before,
        runtime_ms: start.elapsed().as_millis() as u64,
        seed: params.seed,
        trials,
        membership_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ObjectiveOracle;

    fn inst(weights: &[f64], caps: &[f64], f: ObjectiveOracle) -> SmkpInstance {
        let items = weights.iter().enumerate().map(|(i, &w)| Item { id: format!("i{i}"), weight: w }).collect();
        let bins = caps.iter().enumerate().map(|(b, &c)| Bin { id: format!("b{b}"), capacity: c }).collect();
        SmkpInstance::new(items, bins, f).unwrap()
    }

    #[test]
    fn residual_examples() {
        let i = inst(&[2.0, 1.0], &[5.0], ObjectiveOracle::modular(vec![10.0, 1.0]).unwrap());
        let partial = Assignment::from_bins([(0, vec![0])]);
        let r = residual_instance(&i, &partial, 1).unwrap();
        assert_eq!(r.item_map, vec![1]);
        assert_eq!(r.instance.bins[0].capacity, 3.0);
        assert_eq!(r.instance.objective.value(&[0]), 1.0);

        let i = inst(&[2.0, 1.0], &[5.0], ObjectiveOracle::modular(vec![10.0, 7.0]).unwrap());
        let r = residual_instance(&i, &partial, 2).unwrap();
        assert_eq!(r.threshold, 5.0);
        assert!(r.item_map.is_empty());

        // Empty partial: threshold 0 keeps only items without value.
        let i = inst(&[2.0, 1.0], &[5.0], ObjectiveOracle::modular(vec![0.0, 7.0]).unwrap());
        let r = residual_instance(&i, &Assignment::new(), 3).unwrap();
        assert_eq!(r.item_map, vec![0]);
    }

    #[test]
    fn residual_rejects_infeasible_partial() {
        let i = inst(&[6.0], &[5.0], ObjectiveOracle::modular(vec![1.0]).unwrap());
        assert!(residual_instance(&i, &Assignment::from_bins([(0, vec![0])]), 1).is_err());
        assert!(residual_instance(&i, &Assignment::new(), 0).is_err());
    }

    #[test]
    fn partial_counts() {
        let i = inst(&[1.0, 1.0, 1.0], &[5.0, 5.0], ObjectiveOracle::modular(vec![1.0; 3]).unwrap());
        assert_eq!(enumerate_partials(&i, 0, 100).unwrap(), vec![Assignment::new()]);
        assert_eq!(enumerate_partials(&i, 1, 100).unwrap().len(), 7);
        // ξ = 2 adds C(3,2)·2² pairs.
        assert_eq!(enumerate_partials(&i, 2, 100).unwrap().len(), 19);
        assert!(matches!(enumerate_partials(&i, 2, 10).unwrap_err(), SmkpError::Size(_)));

        let one = inst(&[1.0], &[1.0], ObjectiveOracle::modular(vec![1.0]).unwrap());
        assert_eq!(enumerate_partials(&one, 1, 100).unwrap().len(), 2);
    }

    #[test]
    fn single_item_solved() {
        let i = inst(&[3.0], &[4.0], ObjectiveOracle::modular(vec![5.0]).unwrap());
        let params = PipelineParams { xi: 1, ..Default::default() };
        let rep = solve(&i, &params).unwrap();
        assert_eq!(rep.value, 5.0);
        assert_eq!(rep.branches.len(), 2);
    }

    #[test]
    fn seeds_depend_on_partial_only() {
        let a = Assignment::from_bins([(0, vec![1, 2])]);
        let b = Assignment::from_bins([(0, vec![2, 1])]);
        assert_eq!(branch_seed(3, &a), branch_seed(3, &b));
        assert_ne!(branch_seed(3, &a), branch_seed(3, &Assignment::from_bins([(1, vec![1, 2])])));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("paper-faithful".parse::<Mode>().unwrap(), Mode::PaperFaithful);
        assert!("fast".parse::<Mode>().is_err());
    }
}
