//! `qwalk`: runs quantum-walk experiments described by a JSON config and
//! writes positional distributions and sweeps as CSV.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical
//! invariant violation, 3 a symmetry check that does not hold.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical invariant violated: {m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qwalk", version, about = "Discrete-time quantum walk experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for Monte-Carlo sampling; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output path; overrides the config. Standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Symmetry tolerance (default 1e-10, or 1e-8 with a channel).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Recompute the cycle golden file (cycle subcommand only).
    #[arg(long, global = true)]
    pub regen_golden: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve the walk and write its positional distribution.
    Run,
    /// Compare the walk with its symmetry-augmented version.
    SymmetryCheck {
        /// Z, X, PRX, XZ, ZX, Phi(deg), B1(deg)..B4(deg).
        #[arg(long)]
        symmetry: String,
    },
    /// σ and σ ratio for a list of parameter values.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated values (θ in degrees).
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
    },
    /// Distribution from Kraus unravelings (exact or Monte-Carlo).
    Trajectories,
    /// `run` with cycle defaults (101 sites, θ = 30°, 5000 steps).
    Cycle,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    P,
    Theta,
    N,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run => commands::run(&cli.common),
        Command::SymmetryCheck { symmetry } => commands::symmetry_check(&cli.common, &symmetry),
        Command::Sweep { param, values } => commands::sweep(&cli.common, param, &values),
        Command::Trajectories => commands::trajectories(&cli.common),
        Command::Cycle => commands::cycle(&cli.common),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qwalk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
