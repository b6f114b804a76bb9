//! `aw`: inverse Laplace transforms with Abate–Whitt and TAME methods.

mod bench;
mod commands;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spec::CliError;

#[derive(Parser)]
#[command(name = "aw", version, about = "Inverse Laplace transforms via Abate-Whitt and TAME methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a method parameter file.
    Gen(GenArgs),
    /// Invert a builtin transform at one time or on a grid.
    Invert(InvertArgs),
    /// Quality figures, moments, Dirac approximant and error bounds of a method.
    Diag(DiagArgs),
    /// First-return density or CDF of a fluid queue.
    Fluid(FluidArgs),
    /// Write a random fluid-queue model file.
    Model(ModelArgs),
    /// Run one of the benchmark experiments and write CSV files.
    Bench(BenchArgs),
    /// Rebuild the shipped TAME presets into a directory.
    Presets(PresetArgs),
}

#[derive(Args)]
pub struct GenArgs {
    /// euler, talbot, gaver, zakian, tame or cme.
    #[arg(long)]
    pub method: String,
    /// Reduced node count (the order N for zakian).
    #[arg(long)]
    pub nprime: usize,
    /// TAME domain, also used to measure ε for the other methods.
    #[arg(long)]
    pub domain: Option<String>,
    /// AAA stopping tolerance.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    /// Boundary discretization size.
    #[arg(long, default_value_t = aw_core::domains::DEFAULT_COUNT)]
    pub count: usize,
    /// Keep Froissart doublets and tiny terms.
    #[arg(long)]
    pub no_prune: bool,
    /// CME parameter file (required for `--method cme`).
    #[arg(long)]
    pub cme_file: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct InvertArgs {
    /// Method parameter file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub params: Option<PathBuf>,
    /// Use the shipped TAME preset covering this radius.
    #[arg(long)]
    pub preset: Option<f64>,
    /// `builtin:<name>[:k=v,...]`.
    #[arg(long)]
    pub transform: String,
    #[arg(long, conflicts_with = "t_grid", required_unless_present = "t_grid")]
    pub t: Option<f64>,
    /// `a:b:n`, n equispaced points from a to b.
    #[arg(long)]
    pub t_grid: Option<String>,
    /// Add the closed-form value and the absolute error.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Args)]
pub struct DiagArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Measure ε and η on this domain.
    #[arg(long)]
    pub domain: Option<String>,
    /// Discretization size for `--domain` (the measurement uses 4× this).
    #[arg(long, default_value_t = aw_core::domains::DEFAULT_COUNT)]
    pub count: usize,
    #[arg(long)]
    pub moments: bool,
    /// `a:b:n` grid for the Dirac approximant.
    #[arg(long)]
    pub dirac_grid: Option<String>,
    /// `class:args`, repeatable: se:c1;c2, me:nv:nu, phase_type:q_l1:d:mean,
    /// fluid_pdf:lambda:psi_inf, fluid_cdf:lambda:psi_inf:m1, ls:mu_total.
    #[arg(long)]
    pub bounds: Vec<String>,
}

#[derive(Args)]
pub struct FluidArgs {
    /// Model file written by `aw model`.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub model: Option<PathBuf>,
    /// `d_plus:d_minus:seed` random model.
    #[arg(long)]
    pub random: Option<String>,
    /// psi (density) or Psi (CDF).
    #[arg(long, default_value = "psi")]
    pub quantity: String,
    #[arg(long)]
    pub t: f64,
    /// tame (preset), tame:N, talbot:N, euler:N, gaver:N or zakian:N.
    #[arg(long, default_value = "tame")]
    pub method: String,
    /// `i:j` (zero-based) or `all`.
    #[arg(long, default_value = "all")]
    pub entry: String,
    /// Add the a priori error bound for TAME methods.
    #[arg(long)]
    pub bound: bool,
}

#[derive(Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 5)]
    pub d_plus: usize,
    #[arg(long, default_value_t = 10)]
    pub d_minus: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct BenchArgs {
    /// A, B, C, D or E.
    pub id: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `lo:hi[:step]` reduced node sweep for A, B and C.
    #[arg(long)]
    pub nprime: Option<String>,
    /// Comma-separated subset of methods.
    #[arg(long)]
    pub methods: Option<String>,
    /// `a:b:n` time grid replacing the default.
    #[arg(long)]
    pub t_grid: Option<String>,
    /// CME parameter file; without it CME rows are omitted.
    #[arg(long)]
    pub cme: Option<PathBuf>,
}

#[derive(Args)]
pub struct PresetArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = aw_core::domains::DEFAULT_COUNT)]
    pub count: usize,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Invert(a) => commands::invert(a),
        Command::Diag(a) => commands::diag(a),
        Command::Fluid(a) => commands::fluid(a),
        Command::Model(a) => commands::model(a),
        Command::Bench(a) => bench::run(spec::ExperimentSpec::from_args(a)?),
        Command::Presets(a) => commands::presets(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let usage = e.render().to_string();
            eprintln!("{}", serde_json::json!({ "error": "usage", "message": usage.trim_end() }));
            eprint!("{usage}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
