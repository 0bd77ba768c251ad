use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use smkp_core::baseline::solve_greedy;
use smkp_core::block::build_block_instance;
use smkp_core::exact::solve_exact;
use smkp_core::generate::{generate_instance, CapacityProfile, GeneratorKind};
use smkp_core::instance::{assignment_value, check_feasible};
use smkp_core::io::{assignment_ids, instance_to_json, parse_assignment, parse_instance};
use smkp_core::pipeline::{compute_paper_parameters, leveled_setup, solve as run_pipeline, Mode, PipelineParams};
use smkp_core::{SmkpError, SmkpInstance};

use crate::{BenchArgs, CliError, GenerateArgs, InspectArgs, InstanceOut, SolveArgs, SolverFlags, ValidateArgs};

type CliResult<T = ()> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> CliResult<SmkpInstance> {
    parse_instance(&read(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, format!("{text}\n"))
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Assemble pipeline parameters from flags; paper-faithful mode derives `ξ, N, δ, μ` from `ε`.
pub fn pipeline_params(flags: &SolverFlags) -> CliResult<PipelineParams> {
    let mut p = PipelineParams { seed: flags.seed, epsilon: flags.epsilon, ..PipelineParams::default() };
    let mode: Mode = flags.mode.parse()?;
    if mode == Mode::PaperFaithful {
        let eps = flags.epsilon.ok_or_else(|| CliError::usage("paper-faithful mode needs --epsilon"))?;
        let derived = compute_paper_parameters(eps)?;
        eprintln!("warning: {}", derived.warning());
        if flags.xi.is_some() || flags.leveling_n.is_some() || flags.mu.is_some() || flags.delta.is_some() {
            eprintln!("warning: --xi/--leveling-n/--mu/--delta are ignored in paper-faithful mode");
        }
        derived.apply(&mut p);
    } else {
        p.xi = flags.xi.unwrap_or(p.xi);
        p.leveling_n = flags.leveling_n.unwrap_or(p.leveling_n);
        p.mu = flags.mu.unwrap_or(p.mu);
        p.delta = flags.delta.unwrap_or(p.delta);
    }
    p.repetitions = flags.repetitions.unwrap_or(p.repetitions);
    p.max_branches = flags.max_branches.unwrap_or(p.max_branches);
    p.config_cap = flags.config_cap.unwrap_or(p.config_cap);
    p.greedy.steps = flags.steps.unwrap_or(p.greedy.steps);
    p.greedy.samples = flags.samples.unwrap_or(p.greedy.samples);
    p.validate()?;
    Ok(p)
}

pub fn solve(args: SolveArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let params = pipeline_params(&args.solver)?;
    let report = run_pipeline(&instance, &params)?;
    let mut diagnostics = json!({
        "gamma_bound": report.gamma,
        "trials": report.trials,
        "membership_failures": report.membership_failures,
        "oracle_calls": report.oracle_calls,
        "branches": report.branches.len(),
        "best_branch": report.best_branch,
    });
    if args.trace {
        let records: Vec<Value> = report
            .branches
            .iter()
            .map(|r| {
                let mut v = serde_json::to_value(r).expect("records serialize");
                v["partial"] = json!(assignment_ids(&instance, &r.partial));
                v
            })
            .collect();
        diagnostics["branch_records"] = Value::Array(records);
    }
    let result = json!({
        "value": report.value,
        "assignment": assignment_ids(&instance, &report.assignment),
        "params": params,
        "seed": report.seed,
        "diagnostics": diagnostics,
        "runtime_ms": report.runtime_ms,
        "timestamp": timestamp(),
    });
    write_out(args.out.as_deref(), &pretty(&result))
}

pub fn exact(args: InstanceOut) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let start = Instant::now();
    let sol = solve_exact(&instance)?;
    let result = json!({
        "value": sol.value,
        "assignment": assignment_ids(&instance, &sol.assignment),
        "nodes": sol.nodes,
        "runtime_ms": start.elapsed().as_millis() as u64,
        "timestamp": timestamp(),
    });
    write_out(args.out.as_deref(), &pretty(&result))
}

pub fn greedy(args: InstanceOut) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let start = Instant::now();
    let sol = solve_greedy(&instance);
    let result = json!({
        "value": sol.value,
        "assignment": assignment_ids(&instance, &sol.assignment),
        "greedy_value": sol.greedy_value,
        "single_value": sol.single_value,
        "runtime_ms": start.elapsed().as_millis() as u64,
        "timestamp": timestamp(),
    });
    write_out(args.out.as_deref(), &pretty(&result))
}

pub fn generate(args: GenerateArgs) -> CliResult {
    let kind: GeneratorKind = args.kind.parse()?;
    let profile: CapacityProfile = args.profile.parse()?;
    match args.count {
        None => {
            let inst = generate_instance(kind, args.items, args.bins, args.seed, profile)?;
            write_out(Some(&args.out), &instance_to_json(&inst))
        }
        Some(count) => {
            fs::create_dir_all(&args.out)
                .map_err(|e| CliError::internal(format!("cannot create {}: {e}", args.out.display())))?;
            let width = count.saturating_sub(1).to_string().len().max(3);
            for k in 0..count {
                let inst = generate_instance(kind, args.items, args.bins, args.seed + k as u64, profile)?;
                let path = args.out.join(format!("{kind}-{k:0width$}.json"));
                write_out(Some(&path), &instance_to_json(&inst))?;
            }
            Ok(())
        }
    }
}

pub fn validate(args: ValidateArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let assignment = parse_assignment(&instance, &read(&args.assignment)?)?;
    let verdict = check_feasible(&instance, &assignment)?;
    if assignment.union().len() != assignment.placements() {
        eprintln!("note: some items are assigned to more than one bin");
    }
    if verdict.feasible {
        println!("feasible");
        println!("value {}", assignment_value(&instance, &assignment));
        Ok(())
    } else {
        let v = verdict.violation.expect("infeasible verdicts carry a violation");
        println!("infeasible");
        Err(CliError::usage(format!(
            "bin {} violates {:?}: load {} exceeds {}",
            instance.bins[v.bin].id, v.kind, v.amount, v.limit
        )))
    }
}

fn corpus_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries =
        fs::read_dir(dir).map_err(|e| CliError::usage(format!("cannot read corpus {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::usage(format!("no *.json instances in {}", dir.display())));
    }
    Ok(files)
}

#[derive(Serialize)]
struct BenchRow {
    instance: String,
    seed: String,
    opt: Option<f64>,
    pipeline_value: f64,
    greedy_value: f64,
    pipeline_ratio: Option<f64>,
    greedy_ratio: Option<f64>,
    pipeline_ms: f64,
    greedy_ms: f64,
    exact_ms: Option<f64>,
    oracle_calls: f64,
}

fn ratio(v: f64, opt: Option<f64>) -> Option<f64> {
    opt.map(|o| if o > 0.0 { v / o } else { 1.0 })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

pub fn bench(args: BenchArgs) -> CliResult {
    let files = corpus_files(&args.corpus)?;
    let base = pipeline_params(&args.solver)?;
    let mut rows = Vec::new();
    for file in &files {
        let instance = load_instance(file)?;
        let name = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let start = Instant::now();
        let (opt, exact_ms) = match solve_exact(&instance) {
            Ok(sol) => (Some(sol.value), Some(start.elapsed().as_secs_f64() * 1e3)),
            Err(SmkpError::Size(_)) => (None, None),
            Err(e) => return Err(e.into()),
        };
        let start = Instant::now();
        let greedy_value = solve_greedy(&instance).value;
        let greedy_ms = start.elapsed().as_secs_f64() * 1e3;
        for seed in 0..args.seeds {
            let params = PipelineParams { seed, ..base.clone() };
            let start = Instant::now();
            let report = run_pipeline(&instance, &params)?;
            let pipeline_ms = start.elapsed().as_secs_f64() * 1e3;
            if !check_feasible(&instance, &report.assignment)?.feasible {
                return Err(CliError::internal(format!("{name}: pipeline returned an infeasible packing")));
            }
            rows.push(BenchRow {
                instance: name.clone(),
                seed: seed.to_string(),
                opt,
                pipeline_value: report.value,
                greedy_value,
                pipeline_ratio: ratio(report.value, opt),
                greedy_ratio: ratio(greedy_value, opt),
                pipeline_ms,
                greedy_ms,
                exact_ms,
                oracle_calls: report.oracle_calls as f64,
            });
        }
    }
    let summary = BenchRow {
        instance: "MEAN".into(),
        seed: String::new(),
        opt: mean(rows.iter().filter_map(|r| r.opt)),
        pipeline_value: mean(rows.iter().map(|r| r.pipeline_value)).unwrap_or(0.0),
        greedy_value: mean(rows.iter().map(|r| r.greedy_value)).unwrap_or(0.0),
        pipeline_ratio: mean(rows.iter().filter_map(|r| r.pipeline_ratio)),
        greedy_ratio: mean(rows.iter().filter_map(|r| r.greedy_ratio)),
        pipeline_ms: mean(rows.iter().map(|r| r.pipeline_ms)).unwrap_or(0.0),
        greedy_ms: mean(rows.iter().map(|r| r.greedy_ms)).unwrap_or(0.0),
        exact_ms: mean(rows.iter().filter_map(|r| r.exact_ms)),
        oracle_calls: mean(rows.iter().map(|r| r.oracle_calls)).unwrap_or(0.0),
    };
    let mut writer = csv::Writer::from_path(&args.out)
        .map_err(|e| CliError::internal(format!("cannot write {}: {e}", args.out.display())))?;
    for row in rows.iter().chain(std::iter::once(&summary)) {
        writer.serialize(row).map_err(|e| CliError::internal(e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::internal(e.to_string()))?;
    match summary.pipeline_ratio {
        Some(r) => println!("mean pipeline/OPT ratio: {r:.6} over {} runs", rows.len()),
        None => println!("mean pipeline/OPT ratio: n/a (no instance small enough for the exact solver)"),
    }
    Ok(())
}

pub fn inspect_blocks(args: InspectArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let params = pipeline_params(&args.solver)?;
    if instance.bin_count() == 0 {
        return Err(CliError::usage("instance has no bins"));
    }
    let setup = leveled_setup(&instance, params.leveling_n, params.delta)?;
    let bi = build_block_instance(&setup.restricted, &setup.partition, params.mu, params.config_cap)?;
    let leveled = &setup.leveled;
    let n = params.leveling_n;
    let result = json!({
        "leveling_n": n,
        "k": leveled.k(),
        "discarded_bins": leveled.discarded_bins().iter().map(|&b| instance.bins[b].id.as_str()).collect::<Vec<_>>(),
        "block_constraint": bi.diagnostics(),
    });
    write_out(args.out.as_deref(), &pretty(&result))
}
