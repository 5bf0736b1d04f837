//! `condgrad` command line: solve instances, check certificates, run
//! invariance probes, and sweep parameter grids. All inputs are JSON configs;
//! outputs are CSV/JSON files under `--out`.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{cmd_analyze, cmd_invariance, cmd_solve, cmd_sweep, out_dir_of, Overrides};
use config::StrategyDescriptor;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, malformed configs, or inputs outside documented domains.
    Usage(String),
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<condgrad::Error> for CliError {
    fn from(e: condgrad::Error) -> Self {
        match e {
            condgrad::Error::Usage(_)
            | condgrad::Error::DimensionMismatch { .. }
            | condgrad::Error::MissingMetadata(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "condgrad", version, about = "composite conditional gradient toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the instance seed (or the reparametrization seed for
    /// `invariance`)
    #[arg(long)]
    seed: Option<u64>,
    /// Override the iteration budget
    #[arg(long)]
    max_iters: Option<usize>,
    /// Override the stopping tolerance on the best gap
    #[arg(long)]
    gap_tol: Option<f64>,
    /// Override the stepsize rule: exact | backtrack:c,rho | openloop
    #[arg(long)]
    strategy: Option<StrategyDescriptor>,
    /// Rayon thread count (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the solver and write trajectory.csv + summary.json
    Solve(CommonArgs),
    /// Check growth certificates against a recorded trajectory
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// trajectory.csv produced by `solve`
        #[arg(long)]
        trajectory: PathBuf,
    },
    /// Compare runs across a random affine reparametrization
    Invariance(CommonArgs),
    /// Evaluate an instance x strategy x seed grid, one CSV row per cell
    Sweep(CommonArgs),
}

fn overrides(a: &CommonArgs) -> Overrides {
    Overrides {
        seed: a.seed,
        max_iters: a.max_iters,
        gap_tol: a.gap_tol,
        strategy: a.strategy,
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.cmd {
        Cmd::Solve(c) | Cmd::Invariance(c) | Cmd::Sweep(c) => c,
        Cmd::Analyze { common, .. } => common,
    };
    if let Some(threads) = common.threads {
        // ignore the error from re-initializing in-process (tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let out = out_dir_of(&common.out);
    let ov = overrides(common);
    match &cli.cmd {
        Cmd::Solve(c) => cmd_solve(&c.config, &out, &ov),
        Cmd::Analyze { common, trajectory } => cmd_analyze(&common.config, trajectory, &out, &ov),
        Cmd::Invariance(c) => cmd_invariance(&c.config, &out, &ov),
        Cmd::Sweep(c) => cmd_sweep(&c.config, &out, &ov),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Usage(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
