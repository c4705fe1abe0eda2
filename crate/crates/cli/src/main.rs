//! `maxdyn`: exact orbit analysis for the recurrence
//! `x[n+4] = max(x[n+3], x[n+2], x[n+1], 0) - x[n]`.
//!
//! One subcommand per engine capability; initial conditions are four exact
//! literals such as `"2*sqrt(2)" "2" "0" "1"`. Exit codes: 0 success,
//! 1 usage error, 2 precondition error, 3 internal invariant violation.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "maxdyn", version, about = "Exact analysis of the max-type recurrence x[n+4] = max(x[n+3], x[n+2], x[n+1], 0) - x[n]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print orbit terms as exact literals plus floats
    Iterate(CommonArgs),
    /// Classify a normalized window into one of the cases C1..C5
    Classify(CommonArgs),
    /// Trace the case sequence from a C4 window, segmented into routes
    Trace(CommonArgs),
    /// Search for the exact period of the orbit
    Period(CommonArgs),
    /// Predict the accumulation interval of a non-periodic orbit
    Predict(CommonArgs),
    /// Empirical density report over the accumulation interval
    Density(CommonArgs),
    /// Construct nearby periodic tuples from continued-fraction convergents
    Neighbors(CommonArgs),
    /// Evaluate the first integrals V1 and V2 and check conservation
    Invariants(CommonArgs),
    /// Step the fourth-order Lyness map and check H1/H2 conservation
    Lyness(CommonArgs),
    /// Export three window coordinates per step for external plotting
    Export(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Iterate(a)
            | Command::Classify(a)
            | Command::Trace(a)
            | Command::Period(a)
            | Command::Predict(a)
            | Command::Density(a)
            | Command::Neighbors(a)
            | Command::Invariants(a)
            | Command::Lyness(a)
            | Command::Export(a) => a,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Csv,
    #[value(name = "json-lines")]
    JsonLines,
}

#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// Four initial values as exact literals, e.g. --init "2*sqrt(2)" 2 0 1
    #[arg(long, num_args = 4, value_names = ["X1", "X2", "X3", "X4"])]
    init: Option<Vec<String>>,

    /// Steps to iterate (rows to emit, conservation horizon, ...)
    #[arg(short = 'n', long = "steps")]
    steps: Option<u64>,

    /// Search/trace budget (period scan steps; case blocks for `trace`)
    #[arg(long)]
    max_steps: Option<u64>,

    /// Float tolerance for density reports
    #[arg(long)]
    epsilon: Option<f64>,

    /// Output format for tabular commands
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,

    /// Three distinct window coordinates for `export`, e.g. --coords 1,2,3
    #[arg(long)]
    coords: Option<String>,

    /// Write output here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,

    /// Verify each periodic neighbor by direct iteration (in parallel)
    #[arg(long)]
    verify: bool,

    /// How many periodic neighbors to construct
    #[arg(long)]
    count: Option<usize>,

    /// Lyness map parameter (rational literal)
    #[arg(short = 'a', long = "param")]
    param: Option<String>,

    /// Comma-separated eps values for the tropical-limit residual table
    #[arg(long = "tropical-eps")]
    tropical_eps: Option<String>,

    /// Use float coordinates for the Lyness map instead of exact rationals
    #[arg(long)]
    float: bool,

    /// Read defaults from a TOML file (explicit flags win)
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Errors carrying their process exit code.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Precondition(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Precondition(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Precondition(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o error: {e}"))
    }
}

impl From<maxdyn_core::ParseError> for CliError {
    fn from(e: maxdyn_core::ParseError) -> Self {
        CliError::Usage(format!("invalid scalar literal: {e}"))
    }
}

impl From<maxdyn_core::AnalysisError> for CliError {
    fn from(e: maxdyn_core::AnalysisError) -> Self {
        match e {
            maxdyn_core::AnalysisError::Internal(_) => CliError::Internal(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<maxdyn_core::CasesError> for CliError {
    fn from(e: maxdyn_core::CasesError) -> Self {
        match e {
            maxdyn_core::CasesError::GraphViolation { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<maxdyn_core::NormalizeError> for CliError {
    fn from(e: maxdyn_core::NormalizeError) -> Self {
        match e {
            maxdyn_core::NormalizeError::DegenerateLoop { .. } => {
                CliError::Precondition(e.to_string())
            }
            maxdyn_core::NormalizeError::CapExceeded { .. } => CliError::Internal(e.to_string()),
        }
    }
}

impl From<maxdyn_core::LynessError> for CliError {
    fn from(e: maxdyn_core::LynessError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<maxdyn_core::TropicalError> for CliError {
    fn from(e: maxdyn_core::TropicalError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, everything else is usage
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| commands::run(cli.command))) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("maxdyn: {}", e.message());
            e.code()
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            eprintln!("maxdyn: internal invariant violation: {msg}");
            3
        }
    }
}
