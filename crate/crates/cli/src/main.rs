mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use smkp_core::SmkpError;

#[derive(Parser)]
#[command(name = "smkp", version, about = "Monotone submodular multiple knapsack solver")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the enumeration + block-rounding pipeline.
    Solve(SolveArgs),
    /// Exhaustive optimum (small instances only).
    Exact(InstanceOut),
    /// Density-greedy baseline.
    Greedy(InstanceOut),
    /// Write a random instance (or a corpus with --count).
    Generate(GenerateArgs),
    /// Check an assignment against an instance.
    Validate(ValidateArgs),
    /// Sweep a corpus and write a comparison table.
    Bench(BenchArgs),
    /// Print the leveled blocks and block-constraint elements of an instance.
    InspectBlocks(InspectArgs),
}

#[derive(Args, Clone)]
pub struct SolverFlags {
    #[arg(long)]
    xi: Option<u64>,
    #[arg(long)]
    leveling_n: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target gap; drives the parameters in paper-faithful mode.
    #[arg(long)]
    epsilon: Option<f64>,
    /// `practical` or `paper-faithful`.
    #[arg(long, default_value = "practical")]
    mode: String,
    #[arg(long)]
    max_branches: Option<u64>,
    #[arg(long)]
    config_cap: Option<usize>,
    /// Continuous greedy steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Sampled sets per gradient estimate.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
    /// Include per-branch records in the result.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
pub struct InstanceOut {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// coverage, modular or group_saturation.
    #[arg(long, default_value = "coverage")]
    kind: String,
    #[arg(long)]
    items: usize,
    #[arg(long)]
    bins: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// uniform, geometric or random.
    #[arg(long, default_value = "random")]
    profile: String,
    /// File to write, or directory when --count is given.
    #[arg(long)]
    out: PathBuf,
    /// Write this many instances (seeds seed, seed+1, ...) into the --out directory.
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Result file or a bare {bin: [items]} map.
    #[arg(long)]
    assignment: PathBuf,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of instance files (*.json).
    #[arg(long)]
    corpus: PathBuf,
    /// Seeds per instance (0, 1, ...).
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
pub struct InspectArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

/// An error with its process exit code.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
    pub fn internal(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl From<SmkpError> for CliError {
    fn from(e: SmkpError) -> Self {
        let code = match e {
            SmkpError::Input(_) | SmkpError::Json(_) => 2,
            SmkpError::Size(_) | SmkpError::Capacity(_) => 3,
            SmkpError::Internal(_) => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Exact(a) => commands::exact(a),
        Command::Greedy(a) => commands::greedy(a),
        Command::Generate(a) => commands::generate(a),
        Command::Validate(a) => commands::validate(a),
        Command::Bench(a) => commands::bench(a),
        Command::InspectBlocks(a) => commands::inspect_blocks(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
