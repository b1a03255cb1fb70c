//! Command-line front end for `supralap-core`: benchmark generation,
//! spectra by dense or block-DFT decomposition, zero-mode residual
//! experiments and reduced eigenvalue tables.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod edgelist;
pub mod error;
pub mod output;

pub use error::CliError;

/// Environment variable overriding the dense size cap.
pub const MAX_DENSE_ENV: &str = "SUPRALAP_MAX_DENSE_ORDER";
pub const DEFAULT_MAX_DENSE_ORDER: usize = 4000;

#[derive(Debug, Parser)]
#[command(
    name = "supralap",
    version,
    about = "Spectra of temporal network supra-Laplacians"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a benchmark network as a layered edge list.
    Gen(GenArgs),
    /// Eigenvalues of the supra-Laplacian.
    Spectrum(SpectrumArgs),
    /// Zero-mode residuals of the smallest eigenvectors.
    Approx(ApproxArgs),
    /// Residual profiles averaged over seeds on a (p, omega) grid.
    ApproxSweep(SweepArgs),
    /// Eigenvalues of every reduced block of a constant model.
    Reduced(ReducedArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Independent Erdős–Rényi layers.
    Er,
    /// One Erdős–Rényi layer replicated across all time steps.
    ConstantEr,
    /// Independent nested-block hierarchical layers.
    SalesPardo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouplingArg {
    Path,
    Periodic,
}

impl From<CouplingArg> for supralap_core::Coupling {
    fn from(c: CouplingArg) -> Self {
        match c {
            CouplingArg::Path => supralap_core::Coupling::Path,
            CouplingArg::Periodic => supralap_core::Coupling::Periodic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Dense,
    BlockDft,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dense => "dense",
            Method::BlockDft => "block-dft",
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// Nodes per layer.
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability (ER models).
    #[arg(long)]
    pub p: Option<f64>,
    /// Number of layers.
    #[arg(long = "t")]
    pub t: Option<usize>,
    /// Uniform inter-layer weight.
    #[arg(long, default_value_t = 0.0)]
    pub omega: f64,
    #[arg(long, value_enum, default_value = "path")]
    pub coupling: CouplingArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Hierarchy depth (sales-pardo).
    #[arg(long)]
    pub levels: Option<usize>,
    /// Groups per level (sales-pardo).
    #[arg(long)]
    pub branching: Option<usize>,
    /// Target mean degree (sales-pardo).
    #[arg(long)]
    pub avg_degree: Option<f64>,
    /// Density ratio between consecutive levels (sales-pardo).
    #[arg(long)]
    pub rho: Option<f64>,
    /// Explicit per-level edge probabilities, innermost first (sales-pardo).
    #[arg(long, value_delimiter = ',')]
    pub level_probs: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_enum, default_value = "dense")]
    pub method: Method,
    /// Number of smallest eigenvalues written (default: all).
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the eigenvectors, one row per component.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Write wall-clock time to `<out>.timing.json`.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[arg(long, default_value_t = 100)]
    pub top: usize,
    #[arg(long, default_value_t = supralap_core::approx::DEFAULT_RATIO)]
    pub ratio: f64,
    #[arg(long, default_value_t = supralap_core::approx::DEFAULT_FLOOR)]
    pub floor: f64,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// JSON report.
    #[arg(long)]
    pub out: PathBuf,
    /// Residual CSV (default: the report path with a `.csv` extension).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Parameter lists, e.g. `p=0.05,0.1 omega=0.01,1`.
    #[arg(long, num_args = 1.., required = true)]
    pub grid: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed_start: u64,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long = "t", default_value_t = 30)]
    pub t: usize,
    #[arg(long, value_enum, default_value = "path")]
    pub coupling: CouplingArg,
    #[arg(long, default_value_t = 100)]
    pub top: usize,
    #[arg(long, default_value_t = supralap_core::approx::DEFAULT_RATIO)]
    pub ratio: f64,
    #[arg(long, default_value_t = supralap_core::approx::DEFAULT_FLOOR)]
    pub floor: f64,
    /// Aggregate CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-cell JSON summary with transition indices per seed.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct ReducedArgs {
    /// Eigenvalues per block.
    #[arg(long, default_value_t = 100)]
    pub top: usize,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub timing: bool,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("supralap: {e}");
            e.exit_code()
        }
    }
}
