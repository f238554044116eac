//! The `nilsson` command line: argument parsing, dispatch and the exit-code
//! policy (0 success, 1 user error, 2 numerical failure, 3 internal error).

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, ErrorKind};

#[derive(Parser, Debug)]
#[command(name = "nilsson", version, about = "Nilsson-type asymptotic expansions of sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RecurrenceSource {
    /// Recurrence JSON file.
    #[arg(long, conflicts_with = "builtin")]
    pub rec: Option<PathBuf>,
    /// Built-in recurrence: tet6j, apery, geometric.
    #[arg(long)]
    pub builtin: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Formal Nilsson solutions of a recurrence and the dominant expansion.
    AnalyzeRecurrence {
        #[command(flatten)]
        source: RecurrenceSource,
        /// Truncation order K of the g-series.
        #[arg(long, default_value_t = crate::recurrence::DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = crate::series::DEFAULT_PRECISION)]
        precision: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact values of a recurrence with initial values.
    Unroll {
        #[command(flatten)]
        source: RecurrenceSource,
        /// Inclusive range `a..b`.
        #[arg(long)]
        n: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact values of a balanced multisum.
    EvalMultisum {
        /// Built-in term (apery-like, tet6j) or a term JSON file.
        #[arg(long)]
        term: String,
        /// Inclusive range `a..b`.
        #[arg(long)]
        n: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least-squares fit of a Nilsson model; writes an expansion.
    Fit {
        #[arg(long)]
        values: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Fit window `a:b`.
        #[arg(long)]
        window: String,
        #[arg(long, default_value_t = crate::series::DEFAULT_PRECISION)]
        precision: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residual ladder of an expansion against data.
    Check {
        #[arg(long)]
        values: PathBuf,
        #[arg(long)]
        expansion: PathBuf,
        /// Ω cuts, e.g. "3/2,0;5/2,0".
        #[arg(long)]
        cuts: String,
        /// Window `a:b`.
        #[arg(long)]
        window: String,
        #[arg(long)]
        precision: Option<u32>,
        /// Print a table instead of JSON.
        #[arg(long)]
        table: bool,
        /// Exit with status 2 when a rung fails.
        #[arg(long)]
        strict: bool,
    },
    /// Coefficients of Γ(n+1-γ)/Γ(n+1) in powers of 1/n.
    GammaSeries {
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Also print c_k as polynomials in γ.
        #[arg(long)]
        symbolic: bool,
    },
    /// I_{γ,β}(n) in closed form, optionally against quadrature.
    BetaIntegral {
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 0)]
        beta: u32,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 128)]
        precision: u32,
        #[arg(long)]
        quad: bool,
        #[arg(long, default_value_t = 1e-12)]
        rel_tol: f64,
    },
    /// Growth-rate and G-function diagnostics of a value list.
    Diagnose {
        #[arg(long)]
        values: PathBuf,
        /// Window `a:b`; defaults to the last two thirds of the data.
        #[arg(long)]
        window: Option<String>,
    },
}

#[derive(Debug)]
pub(crate) enum CliError {
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Lib(e) => match e.kind() {
                ErrorKind::User => 1,
                ErrorKind::Numerical => 2,
                ErrorKind::Internal => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(m) => f.write_str(m),
        }
    }
}

/// Runs one command; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind as K;
            return match e.kind() {
                K::DisplayHelp | K::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    match commands::dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
