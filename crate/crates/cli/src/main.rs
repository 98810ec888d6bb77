use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meanking_core::verify::Suite;
use meanking_core::Mode;

mod commands;

use commands::Failure;

pub const GALOIS_DIMS: [usize; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];
pub const MODULAR_MAX: usize = 21;

#[derive(Debug, Parser)]
#[command(
    name = "meanking",
    version,
    about = "Finite-field MUBs, Bell states, the Mean King protocol and discrete Wigner operators"
)]
pub struct Cli {
    /// Numerical tolerance for all comparisons.
    #[arg(long, global = true, env = "MEANKING_TOL", default_value_t = 1e-9, value_parser = positive_tol)]
    pub tol: f64,

    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Arithmetic tables of GF(p^m) or Z_N.
    Field {
        #[command(subcommand)]
        action: FieldAction,
    },
    /// Displacement operators grouped by commuting class.
    Pauli {
        #[command(subcommand)]
        action: PauliAction,
    },
    /// Pairwise overlap report for the N+1 bases.
    Mub {
        #[command(flatten)]
        target: Target,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Bell-state basis-change tables.
    Bell {
        #[command(subcommand)]
        action: BellAction,
    },
    /// Mean King protocol simulation.
    King {
        #[command(subcommand)]
        action: KingAction,
    },
    /// Wigner (and optionally Weyl) grid of a density matrix.
    Wigner {
        #[arg(long)]
        dim: usize,
        /// JSON file holding the matrix as rows of [re, im] pairs.
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        weyl: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run property suites and print a pass/fail table.
    Verify {
        /// Suite to run; `--suite` takes precedence.
        #[arg(value_parser = parse_suite)]
        suite: Option<Suite>,
        #[arg(long = "suite", value_parser = parse_suite)]
        suite_flag: Option<Suite>,
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum FieldAction {
    Info {
        #[arg(long, default_value_t = Mode::Galois)]
        mode: Mode,
        /// Characteristic in galois mode, N in modular mode.
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum PauliAction {
    Dump {
        #[command(flatten)]
        target: Target,
        /// Only this class (0..=N).
        #[arg(long)]
        class: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum BellAction {
    Map {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum KingAction {
    Run {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumerate every branch instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Target {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = Mode::Galois)]
    pub mode: Mode,
}

fn positive_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("tolerance must be a positive number, got `{s}`")),
    }
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

/// Dimensions the tool accepts; larger ones make the exhaustive suites slow.
pub fn check_admissible(target: Target) -> Result<(), Failure> {
    let ok = match target.mode {
        Mode::Galois => GALOIS_DIMS.contains(&target.dim),
        Mode::Modular => target.dim % 2 == 1 && (3..=MODULAR_MAX).contains(&target.dim),
    };
    if ok {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "dimension {} is not admissible in {} mode (galois: {:?}; modular: odd 3..={MODULAR_MAX})",
            target.dim, target.mode, GALOIS_DIMS
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
