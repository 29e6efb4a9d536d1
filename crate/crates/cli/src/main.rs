//! `minres`: compute minimum-resolution kernels, run approximation experiments
//! and the regression suite.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::FileConfig;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "MINRES_THREADS";

#[derive(Parser, Debug)]
#[command(name = "minres", version, about = "Minimum-resolution polynomial kernels on [-1,1]^n")]
struct Cli {
    /// JSON config sidecar; command-line flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: MINRES_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log solver iterations to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the optimal kernel and print sigma^2.
    Sigma(SigmaArgs),
    /// Solve over a range of degrees and emit (r, r', sigma^2) records.
    Sweep(SweepArgs),
    /// Uniform error of a kernel approximation on a grid.
    Approx(ApproxArgs),
    /// Block structure of the symmetry-reduced program.
    Blocks(BlocksArgs),
    /// Dump K(x, y) for x on a grid and fixed y.
    KernelGrid(KernelGridArgs),
    /// Summarize a coefficient file.
    Inspect(InspectArgs),
    /// Run the acceptance suite.
    Regress(RegressArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    On,
    Off,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Sdp,
    Product,
    Fejer,
    Dirichlet,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SolverArgs {
    #[arg(long)]
    pub tol_gap: Option<f64>,
    #[arg(long)]
    pub tol_feas: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub step_fraction: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SigmaArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<u32>,
    /// Gram degree r' >= r; defaults to r.
    #[arg(long)]
    pub rprime: Option<u32>,
    #[arg(long, value_enum)]
    pub symmetry: Option<Symmetry>,
    /// Write the coefficient file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for the symmetry-adapted basis.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Degrees: `4`, `1..10` or `2,4,8`.
    #[arg(long)]
    pub r: Option<String>,
    /// Gram degrees for a decoupled sweep at a single r.
    #[arg(long)]
    pub rprime: Option<String>,
    #[arg(long, value_enum)]
    pub symmetry: Option<Symmetry>,
    /// Write CSV records here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct ApproxArgs {
    /// `builtin:qsin`, `builtin:peaks`, `builtin:one` or `table:PATH`.
    #[arg(long)]
    pub func: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelKind>,
    /// Use this coefficient file instead of solving.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Grid points per axis for the uniform error.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Quadrature nodes per axis for the Chebyshev coefficients.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// CSV dump of (x, f(x), approx(x)).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct BlocksArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct KernelGridArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelKind>,
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Fixed second argument, comma separated; defaults to the origin.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y: Option<Vec<f64>>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    pub path: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct RegressArgs {
    /// Also run the stretch targets.
    #[arg(long)]
    pub stretch: bool,
    /// Skip the stretch targets even if MINRES_STRETCH is set.
    #[arg(long, conflicts_with = "stretch")]
    pub fast: bool,
    /// Criteria to run, e.g. `1,3,4`; all by default.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u8>>,
    /// Reference values to use instead of the embedded fixture.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub grid: Option<usize>,
}

/// A bad invocation, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Settings shared by every command.
pub struct Context {
    pub file: FileConfig,
    pub verbose: bool,
}

fn thread_count(flag: Option<usize>, file: &FileConfig) -> anyhow::Result<Option<usize>> {
    if let Some(t) = flag.or(file.threads) {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.is_empty() => v
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        _ => Ok(None),
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(|e| usage(format!("{e:#}")))?,
        None => FileConfig::default(),
    };
    if let Some(t) = thread_count(cli.threads, &file)? {
        if t == 0 {
            return Err(usage("thread count must be positive"));
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let ctx = Context {
        file,
        verbose: cli.verbose,
    };
    match cli.command {
        Command::Sigma(a) => commands::sigma(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Approx(a) => commands::approx(&ctx, a),
        Command::Blocks(a) => commands::blocks(&ctx, a),
        Command::KernelGrid(a) => commands::kernel_grid(&ctx, a),
        Command::Inspect(a) => commands::inspect(&ctx, a),
        Command::Regress(a) => commands::regress(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
