//! Batch verification driver for the CL(b, φ) engine.
//!
//! Every subcommand loads a JSON configuration, builds the algebra and the
//! requested objects, sweeps the configured window, and writes a
//! deterministic JSON report. Exit codes: 0 all checks passed, 1 at least
//! one check failed, 2 configuration or input error.

mod commands;
mod config;
mod inputs;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::Invocation;
use report::Report;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad configuration: unparseable JSON, unknown keys, invalid parameters.
    Config(String),
    /// Malformed table input files.
    Input(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Input(msg) => write!(f, "input error: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "clconf",
    about = "Exact verification sweeps for graded Lie conformal algebras",
    version
)]
struct Cli {
    /// Path to the JSON configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the window from the configuration.
    #[arg(long, global = true)]
    window: Option<i64>,
    /// Override the coefficient index window from the configuration.
    #[arg(long = "index-window", global = true)]
    index_window: Option<i64>,
    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized sampling sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check admissibility of (Δ, b, φ).
    Validate,
    /// Skew-symmetry of the λ-bracket over window pairs.
    Skew,
    /// Jacobi identity of the λ-bracket over window triples.
    Jacobi,
    /// Gel'fand–Dorfman axioms of the associated data over window triples.
    Gd,
    /// Quadratic reconstruction of the bracket from the GD data.
    Quadratic,
    /// Coefficient-algebra consistency and sampled Jacobi checks.
    Coeff,
    /// Cocycle conditions for a central extension.
    ExtCheck,
    /// Canonical decomposition of a cocycle into coboundary + diagonal part.
    ExtCanonicalize,
    /// Equivalence of the extensions attached to g and g2.
    ExtEquiv,
    /// Conformal-derivation identity for a derivation table.
    DerCheck,
    /// Inner decomposition of a derivation table.
    DerInner,
    /// Module identity for a family or module table.
    ModCheck,
    /// Case-shape classification of a family's structure polynomials.
    ModClassify,
    /// Module identity after a gauge rescaling.
    ModGauge,
    /// Kernel dimensions of the finite-module obstruction systems.
    FiniteObstruct,
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let config_path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let cfg = config::load(config_path)?;
    let window = match cli.window {
        Some(w) if w >= 1 => w,
        Some(w) => {
            return Err(CliError::Config(format!("--window must be ≥ 1, got {w}")));
        }
        None => cfg.window,
    };
    let index_window = match cli.index_window {
        Some(w) if w >= 0 => w,
        Some(w) => {
            return Err(CliError::Config(format!(
                "--index-window must be ≥ 0, got {w}"
            )));
        }
        None => cfg.coeff_index_window,
    };
    let inv = Invocation {
        cfg: &cfg,
        config_path,
        window,
        index_window,
        seed: cli.seed.unwrap_or(0),
    };
    match cli.command {
        Command::Validate => commands::validate(&inv),
        Command::Skew => commands::skew(&inv),
        Command::Jacobi => commands::jacobi(&inv),
        Command::Gd => commands::gd(&inv),
        Command::Quadratic => commands::quadratic(&inv),
        Command::Coeff => commands::coeff(&inv),
        Command::ExtCheck => commands::ext_check(&inv),
        Command::ExtCanonicalize => commands::ext_canonicalize(&inv),
        Command::ExtEquiv => commands::ext_equiv(&inv),
        Command::DerCheck => commands::der_check(&inv),
        Command::DerInner => commands::der_inner(&inv),
        Command::ModCheck => commands::mod_check(&inv),
        Command::ModClassify => commands::mod_classify(&inv),
        Command::ModGauge => commands::mod_gauge(&inv),
        Command::FiniteObstruct => commands::finite_obstruct(&inv),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let pool = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => Some(pool),
            Err(e) => {
                eprintln!("config error: cannot build thread pool: {e}");
                return ExitCode::from(2);
            }
        },
        None => None,
    };

    let start = Instant::now();
    let outcome = match &pool {
        Some(pool) => pool.install(|| run(&cli)),
        None => run(&cli),
    };

    match outcome {
        Ok(mut report) => {
            report.finalize(start.elapsed().as_millis());
            if let Err(e) = report.write(cli.out.as_deref()) {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
