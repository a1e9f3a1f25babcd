//! Command-line front end. Exit codes: 0 success, 2 usage/parse error, 3 evaluation
//! error, 4 malformed GF01 input, 5 a check failed.

mod commands;
mod matrix;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;

pub use matrix::{default_level, run_check, CheckOptions, CHECK_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EVAL: i32 = 3;
pub const EXIT_GF01: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "levymult", version, about = "Levy multipliers: evaluation, grid application and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a symbol at frequencies; prints `xi..., re, im` rows.
    Symbol(SymbolArgs),
    /// Apply a multiplier to a GF01 field.
    Apply(ApplyArgs),
    /// Run a named check matrix.
    Check(CheckArgs),
    /// Run the compound Poisson projection experiment.
    Simulate(SimulateArgs),
    /// Run a reduced matrix of every check and write a JSON/CSV bundle.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct SymbolArgs {
    /// Descriptor JSON, inline or a path.
    #[arg(long)]
    symbol: String,
    /// Frequency as comma-separated coordinates; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    xi: Vec<String>,
    /// CSV file with one frequency per row.
    #[arg(long)]
    xi_file: Option<PathBuf>,
    #[arg(long)]
    level: Option<u32>,
}

#[derive(Debug, Args)]
struct ApplyArgs {
    #[arg(long)]
    symbol: String,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: Option<PathBuf>,
    /// Exponent of the extra norm reported next to L².
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    level: Option<u32>,
    /// Also write the JSON summary here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    name: String,
    #[command(flatten)]
    opts: CheckFlags,
}

#[derive(Debug, Args, Default)]
struct CheckFlags {
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Grid points per axis for grid-based checks.
    #[arg(long)]
    grid: Option<usize>,
    /// Path count for simulator checks.
    #[arg(long)]
    paths: Option<usize>,
    /// Bound kind for lp-ratio: conjecture, thm-main, thm-second, dpv-riesz, two-bound.
    #[arg(long)]
    bound: Option<String>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Simulation config JSON, inline or a path; defaults to the standard experiment.
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// GF01 dump of the binned conditional means.
    #[arg(long = "out")]
    output: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Plot-ready table, one row per report.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Gf01 { .. } => EXIT_GF01,
            Error::Descriptor(_) | Error::Json(_) | Error::InvalidArgument(_) | Error::Io(_) => EXIT_USAGE,
            Error::ShapeMismatch(_) | Error::UnsupportedDimension(..) => EXIT_USAGE,
            Error::Domain(_) | Error::NonFinite(_) | Error::VanishingDenominator { .. } | Error::ModulatorBound(_) => {
                EXIT_EVAL
            }
        };
        CliError { code, message: e.to_string() }
    }
}

pub(crate) type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Symbol(a) => commands::symbol(&a, out),
        Command::Apply(a) => commands::apply(&a, out),
        Command::Check(a) => commands::check(&a, out, err),
        Command::Simulate(a) => commands::simulate(&a, out, err),
        Command::Report(a) => commands::report(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
