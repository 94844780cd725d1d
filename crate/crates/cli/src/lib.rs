//! Command-line front end: argument model, dispatch and exit codes.

pub mod commands;
pub mod table;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use bht_core::io::read_pair;
use bht_core::spectrum::DEFAULT_ATOM_CAP;

use crate::commands::{MethodChoice, Routes};
use crate::table::Format;

/// Environment variable overriding the product atom cap.
pub const ATOM_CAP_VAR: &str = "BHT_ATOM_CAP";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bht_core::Error),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// 1 domain error, 2 I/O or parse error, 3 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(bht_core::Error::Parse(_) | bht_core::Error::Io(_)) => 2,
            CliError::Core(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bht",
    version,
    about = "Optimal power and error exponents of binary hypothesis tests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal power and randomized test per type-I budget.
    Exact {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1,0.25,0.5")]
        epsilon: Vec<f64>,
    },
    /// Cross-check the three power routes and both optimality conditions.
    Verify {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_delimiter = ',', default_value = "0,0.01,0.05,0.1,0.25,0.5,0.75,0.9,1")]
        epsilon: Vec<f64>,
    },
    /// Rényi upper bound on the log-power per exponent r.
    Renyi {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2")]
        r: Vec<f64>,
    },
    /// Gaussian surrogate and Berry–Esseen sandwich on block products.
    Gaussian {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_delimiter = ',', default_value = "16,64,256")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5")]
        epsilon: Vec<f64>,
    },
    /// Exact and large-deviation block exponents.
    Exponent {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.02,0.05,0.1")]
        r: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "64,256,1024")]
        n: Vec<usize>,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodChoice,
    },
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Distribution file, JSON or CSV (by extension).
    #[arg(long)]
    pub input: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Report nats-valued result columns in bits.
    #[arg(long)]
    pub bits: bool,
}

impl Command {
    fn io(&self) -> &IoArgs {
        match self {
            Command::Exact { io, .. }
            | Command::Verify { io, .. }
            | Command::Renyi { io, .. }
            | Command::Gaussian { io, .. }
            | Command::Exponent { io, .. } => io,
        }
    }
}

fn nonempty<T>(name: &str, values: &[T]) -> Result<(), CliError> {
    if values.is_empty() {
        Err(CliError::Config(format!("--{name} needs at least one value")))
    } else {
        Ok(())
    }
}

/// Atom cap from [`ATOM_CAP_VAR`] (already read from the environment).
pub fn parse_atom_cap(raw: Option<&str>) -> Result<usize, CliError> {
    match raw {
        None => Ok(DEFAULT_ATOM_CAP),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(cap) if cap > 0 => Ok(cap),
            _ => Err(CliError::Config(format!(
                "{ATOM_CAP_VAR} must be a positive integer, got `{s}`"
            ))),
        },
    }
}

/// Runs a parsed command with the given verify routes and atom cap, and
/// writes the table. Verification failures are reported after the table
/// is written.
pub fn run_with(command: &Command, routes: &Routes, cap: usize) -> Result<(), CliError> {
    let io = command.io();
    let pair = read_pair(&io.input)?;
    let report = match command {
        Command::Exact { epsilon, .. } => {
            nonempty("epsilon", epsilon)?;
            commands::cmd_exact(&pair, epsilon)?.into()
        }
        Command::Verify { epsilon, .. } => {
            nonempty("epsilon", epsilon)?;
            commands::cmd_verify(&pair, epsilon, routes)?
        }
        Command::Renyi { r, .. } => {
            nonempty("r", r)?;
            commands::cmd_renyi(&pair, r)?.into()
        }
        Command::Gaussian { n, epsilon, .. } => {
            nonempty("n", n)?;
            nonempty("epsilon", epsilon)?;
            commands::cmd_gaussian(&pair, n, epsilon, cap)?.into()
        }
        Command::Exponent { r, n, method, .. } => {
            nonempty("r", r)?;
            nonempty("n", n)?;
            commands::cmd_exponent(&pair, r, n, *method, cap)?.into()
        }
    };
    let text = report.table.render(io.format, io.bits);
    match &io.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    match report.failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

/// Parses `args`, runs with the standard routes and the environment's atom
/// cap, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = std::env::var(ATOM_CAP_VAR)
        .ok()
        .as_deref()
        .map_or(Ok(DEFAULT_ATOM_CAP), |raw| parse_atom_cap(Some(raw)))
        .and_then(|cap| run_with(&cli.command, &Routes::standard(), cap));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("bht: {e}");
            e.exit_code()
        }
    }
}

impl From<table::Table> for commands::Report {
    fn from(table: table::Table) -> Self {
        commands::Report { table, failure: None }
    }
}
