mod commands;
mod format;
mod manifest;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crosscov::compare::DEFAULT_TOL;
use crosscov::detection::DEFAULT_MARGIN;
use crosscov::ensemble::{DEFAULT_BINS, DEFAULT_BLOCK_SIZE};
use crosscov::stieltjes::{DEFAULT_ETA, DEFAULT_GRID_POINTS};

/// Null singular-value spectra of sample cross-covariance matrices.
#[derive(Parser, Debug)]
#[command(name = "crosscov", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Theory density of nonzero singular values.
    Density(DensityArgs),
    /// Spectral edges, numeric and closed form.
    Edges(EdgesArgs),
    /// Monte Carlo histogram of nonzero singular values.
    Simulate(SimulateArgs),
    /// Monte Carlo histogram scored against theory.
    Compare(CompareArgs),
    /// Flags observed singular values above the noise band.
    Detect(DetectArgs),
    /// Repeats the run recorded in an earlier output's manifest.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Numeric,
    #[value(name = "auto_limit", alias = "auto-limit")]
    AutoLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Rep {
    Ctc,
    Cct,
    H,
}

/// Either limiting ratios or a finite shape.
#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// N_X / T.
    #[arg(long, requires = "py", conflicts_with_all = ["t", "nx", "ny", "sigma_x", "sigma_y"])]
    pub px: Option<f64>,
    /// N_Y / T.
    #[arg(long, requires = "px")]
    pub py: Option<f64>,
    /// Number of samples.
    #[arg(long, requires_all = ["nx", "ny"])]
    pub t: Option<usize>,
    #[arg(long, requires = "t")]
    pub nx: Option<usize>,
    #[arg(long, requires = "t")]
    pub ny: Option<usize>,
    /// Noise level of X, used to standardize it.
    #[arg(long, requires = "t")]
    pub sigma_x: Option<f64>,
    #[arg(long, requires = "t")]
    pub sigma_y: Option<f64>,
}

/// A finite shape, required by commands that draw samples.
#[derive(Args, Debug, Clone)]
pub struct ShapeArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub nx: usize,
    #[arg(long)]
    pub ny: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_x: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_y: f64,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
    /// Multiply singular values by √(p_X p_Y).
    #[arg(long)]
    pub scaled: bool,
}

#[derive(Args, Debug, Clone)]
pub struct EnsembleArgs {
    #[arg(long, default_value_t = 500)]
    pub realizations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Columns per Gram accumulation block.
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
    pub block_size: usize,
    /// Memory budget in bytes; shrinks the block size and the number of
    /// concurrent realizations to fit.
    #[arg(long)]
    pub max_mem: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct DensityArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Regulator relative to max(1, upper edge).
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    #[arg(long, value_enum, default_value_t = Rep::Ctc)]
    pub representation: Rep,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct EdgesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = Mode::Numeric)]
    pub mode: Mode,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Also write realization 0's singular values, one per line.
    #[arg(long)]
    pub values_out: Option<std::path::PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 2048)]
    pub grid_points: usize,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Compare against these ratios instead of the simulated shape's.
    #[arg(long, requires = "theory_py")]
    pub theory_px: Option<f64>,
    #[arg(long, requires = "theory_px")]
    pub theory_py: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct DetectArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// File of comma- or newline-separated singular values; `-` for stdin.
    #[arg(long)]
    pub values: String,
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    pub margin: f64,
    #[arg(long, value_enum, default_value_t = Mode::Numeric)]
    pub mode: Mode,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    /// A JSON or CSV output of an earlier run.
    pub from: std::path::PathBuf,
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn,crosscov::edges=error")).init();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
