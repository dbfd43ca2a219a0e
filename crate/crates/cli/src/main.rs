//! `cmpreserve`: configuration-driven experiment runner.
//!
//! Every verb reads one JSON config and writes CSV files plus `summary.json`
//! into the output directory. Exit status: 0 on success, 2 on a validation
//! error, 3 on a numerical failure.

// `!(x >= 0.0)` is used on purpose so that NaN fails argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

mod config;
mod csvout;
mod run;

#[derive(Debug)]
pub enum CliError {
    /// Bad config or arguments; the message names the offending field.
    Validation(String),
    /// A solver or evaluation failed on valid input.
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn field(field: &str, msg: &str) -> Self {
        CliError::Validation(format!("{field}: {msg}"))
    }

    pub fn from_core(context: &str, e: cmpreserve::Error) -> Self {
        use cmpreserve::Error as E;
        match e {
            E::InvalidArgument(_) | E::UnsupportedDomain(_) | E::GridMismatch(_) => {
                CliError::Validation(format!("{context}: {e}"))
            }
            E::SingularSequence
            | E::StepFailure { .. }
            | E::Evaluation { .. }
            | E::SingularStep
            | E::Quadrature(_) => CliError::Numerical(format!("{context}: {e}")),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Written to `summary.json` after every successful run.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub version: &'static str,
    pub verb: &'static str,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    pub checks: Vec<CheckRecord>,
    pub values: BTreeMap<String, serde_json::Value>,
}

impl Summary {
    pub fn new(verb: &'static str, config: &impl Serialize) -> Self {
        Summary {
            version: csvout::VERSION,
            verb,
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            outputs: Vec::new(),
            checks: Vec::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckRecord {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn value(&mut self, key: impl Into<String>, v: impl Serialize) {
        self.values.insert(
            key.into(),
            serde_json::to_value(v).unwrap_or(serde_json::Value::Null),
        );
    }
}

#[derive(Parser)]
#[command(
    name = "cmpreserve",
    version,
    about = "CM-preserving fractional scheme experiments"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Io {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Verb {
    /// Dump (omega, a) weights and check complete monotonicity.
    Weights(Io),
    /// Integrate a fractional ODE preset from one or more initial states.
    Solve(Io),
    /// Integrate a Volterra equation with CM kernels.
    Volterra(Io),
    /// Boundary locus of the instability set and an empirical lambda grid.
    Stability(Io),
    /// Error table for a sequence of steps.
    Converge(Io),
    /// Linear test equation: long-time decay and CM check.
    Decay(Io),
    /// Time-fractional advection-diffusion on a 1-D grid.
    Pde(Io),
    /// Local truncation error of the discrete derivative on known solutions.
    Truncation(Io),
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

type Runner = Box<dyn FnOnce(&Path, &Path) -> Result<Summary, CliError>>;

fn execute(verb: Verb) -> Result<(PathBuf, Summary), CliError> {
    let (io, f): (Io, Runner) = match verb {
        Verb::Weights(io) => (io, Box::new(|c, o| run::weights(load(c)?, o))),
        Verb::Solve(io) => (io, Box::new(|c, o| run::solve(load(c)?, o))),
        Verb::Volterra(io) => (io, Box::new(|c, o| run::volterra(load(c)?, o))),
        Verb::Stability(io) => (io, Box::new(|c, o| run::stability(load(c)?, o))),
        Verb::Converge(io) => (io, Box::new(|c, o| run::converge(load(c)?, o))),
        Verb::Decay(io) => (io, Box::new(|c, o| run::decay(load(c)?, o))),
        Verb::Pde(io) => (io, Box::new(|c, o| run::pde(load(c)?, o))),
        Verb::Truncation(io) => (io, Box::new(|c, o| run::truncation(load(c)?, o))),
    };
    fs::create_dir_all(&io.out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", io.out.display())))?;
    let summary = f(&io.config, &io.out)?;
    let text = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Io(format!("summary: {e}")))?;
    fs::write(io.out.join("summary.json"), text + "\n")
        .map_err(|e| CliError::Io(format!("summary: {e}")))?;
    Ok((io.out, summary))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.verb) {
        Ok((out, summary)) => {
            let failed = summary.checks.iter().filter(|c| !c.passed).count();
            println!(
                "{}: wrote {} files to {}; {} checks, {} not satisfied",
                summary.verb,
                summary.outputs.len() + 1,
                out.display(),
                summary.checks.len(),
                failed
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cmpreserve: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
