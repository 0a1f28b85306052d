//! `radop`: eigenvalue sequences of radial Bergman-space operators from the
//! command line. Every subcommand emits a JSON report
//! `{command, version, config, result}`; `--out x.csv` exports the
//! subcommand's table instead.
//!
//! Exit status: 0 success, 1 usage, 2 invalid input, 3 tolerance not
//! reached, 4 a reported check failed.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use radop_core::ErrorClass;
use serde::Serialize;

use output::Format;

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
pub struct AssertionFailure(pub String);

impl std::fmt::Display for AssertionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "check failed: {}", self.0)
    }
}

impl std::error::Error for AssertionFailure {}

#[derive(Debug, Parser)]
#[command(
    name = "radop",
    version,
    about = "Radial Toeplitz operators on the Bergman space"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Worker threads (default: one per core). Results do not depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Fail instead of extending a window that is too short.
    #[arg(long, global = true)]
    pub strict_window: bool,
    /// Output file: `.csv` for the table, anything else for the JSON report.
    #[arg(long, global = true, visible_alias = "output")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Stdout format when `--out` is absent.
    #[arg(long, global = true, value_enum)]
    #[serde(skip)]
    pub format: Option<Format>,
    /// Log verbosity: -v info, -vv debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    #[serde(skip)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of the Toeplitz operator of a radial symbol.
    Eig(commands::EigArgs),
    /// Sup norm and the d1, d2 seminorms of a window.
    Seminorms(commands::SeminormsArgs),
    /// Hausdorff moment grid (k+1) C(k,m) |Δ^m μ|.
    Hausdorff(commands::HausdorffArgs),
    /// Greedy approximation of a d1 window by a d2 window.
    #[command(name = "project-d2")]
    ProjectD2(commands::ProjectArgs),
    /// The invariant-Laplacian sequence γ and the norm-equivalence check.
    Gamma(commands::GammaArgs),
    /// Eigenvalues recovered from γ and λ_0.
    #[command(name = "gamma-inverse")]
    GammaInverse(commands::GammaInverseArgs),
    /// k-Berezin transform of a radial operator at sample radii.
    Berezin(commands::BerezinArgs),
    /// Toeplitz iterates of the k-Berezin transform and their deviation.
    Iterate(commands::IterateArgs),
    /// Lipschitz-type constant and bounds for an averaged symbol.
    #[command(name = "lcon-check")]
    LconCheck(commands::LconArgs),
    /// Window whose limit points trace a polyline.
    #[command(name = "spectrum-gen")]
    SpectrumGen(commands::SpectrumGenArgs),
    /// Clustered limit points of a window tail.
    #[command(name = "spectrum-limits")]
    SpectrumLimits(commands::SpectrumLimitsArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    if err.downcast_ref::<AssertionFailure>().is_some() {
        return 4;
    }
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<radop_core::Error>() {
            return match e.class() {
                ErrorClass::Validation => 2,
                ErrorClass::Tolerance => 3,
                ErrorClass::Internal => 4,
            };
        }
    }
    2
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| UsageError(format!("--threads: {e}")))?;
    }
    let output = commands::dispatch(&cli.global, &cli.command)?;
    output.emit(cli.global.out.as_deref(), cli.global.format)?;
    if let Some(msg) = output.assertion_failure {
        return Err(AssertionFailure(msg).into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
