//! Command-line driver: model files in, key/value or JSON reports out.

pub mod compute;
pub mod model;
pub mod report;
pub mod sweep;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use escape_core::Tolerances;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("computation error: {0}")]
    Compute(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 1,
            CliError::Compute(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<escape_core::Error> for CliError {
    fn from(e: escape_core::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Compute(format!("write failed: {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "escape", version, about = "Escape rates of Markov measures through cylinder holes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Escape rate of the hole in a model file.
    Compute(ComputeArgs),
    /// One hole per line, results as CSV.
    Sweep(SweepArgs),
    /// Run the identity and bound checks on a model file.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Spectral,
    Generating,
    Polynomial,
    Oracle,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Debug, Args)]
pub struct Common {
    /// Arithmetic; defaults to exact whenever the weights are rational.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Root-isolation width and power-iteration tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub precision: f64,
    /// Survival terms used by the oracle.
    #[arg(long, default_value_t = 60)]
    pub oracle_terms: usize,
}

impl Common {
    pub fn tolerances(&self) -> Result<Tolerances, CliError> {
        if !(self.precision > 0.0 && self.precision < 1.0) {
            return Err(CliError::Usage(format!(
                "--precision must lie in (0, 1), got {}",
                self.precision
            )));
        }
        Ok(Tolerances::with_precision(self.precision))
    }
}

#[derive(Clone, Debug, Args)]
pub struct ComputeArgs {
    pub model: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::All)]
    pub method: MethodArg,
    /// Replaces the hole from the model file.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub hole: Option<Vec<String>>,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Debug, Args)]
pub struct SweepArgs {
    pub model: PathBuf,
    pub holes: PathBuf,
    /// CSV destination; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::All)]
    pub method: MethodArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    pub model: PathBuf,
    #[arg(long)]
    pub json: bool,
    /// Longest word used by the exhaustive checks.
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "escape: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Compute(a) => {
            let report = compute::run(a)?;
            let text = if a.json { report.to_json() } else { report.to_text() };
            out.write_all(text.as_bytes()).map_err(io_err)?;
            Ok(if report.disagrees() { 3 } else { 0 })
        }
        Command::Sweep(a) => {
            let table = sweep::run(a)?;
            match &a.output {
                Some(path) => {
                    let file = std::fs::File::create(path)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                    sweep::write_csv(&table, file)?;
                }
                None => sweep::write_csv(&table, &mut *out)?,
            }
            Ok(0)
        }
        Command::Verify(a) => {
            let report = verify::run(a)?;
            let text = if a.json { report.to_json() } else { report.to_text() };
            out.write_all(text.as_bytes()).map_err(io_err)?;
            if report.failed() > 0 {
                return Err(CliError::Verification(format!("{} check(s) failed", report.failed())));
            }
            Ok(0)
        }
    }
}
