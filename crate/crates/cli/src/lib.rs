//! The `catdiv` command-line harness: compute, verify and report.
//!
//! [`run`] parses arguments, executes one command and returns a [`Report`];
//! [`render`] turns it into the requested output format. Reports contain no
//! timing or environment data, so equal arguments give byte-identical output.

mod commands;
pub mod verify;
pub mod wire;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use catdiv_core::{FieldTag, PrimeSet};

pub use commands::Command;

#[derive(Debug, Error)]
pub enum CliError {
    /// `--help` or `--version` output; not a failure
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
    #[error("bound exhausted: {0}")]
    BoundExhausted(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Help(_) => "help",
            CliError::Parse(_) => "parse",
            CliError::Domain(_) => "domain",
            CliError::BoundExhausted(_) => "bound-exhausted",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Parse(_) => 2,
            CliError::BoundExhausted(_) => 3,
            CliError::Domain(_) => 4,
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({ "status": "error", "kind": self.kind(), "message": self.to_string() })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

macro_rules! domain_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}

domain_errors!(
    catdiv_core::smooth::SmoothError,
    catdiv_core::linalg::LinalgError,
    catdiv_core::burnside::BurnsideError,
    catdiv_core::cantor::CantorError,
    catdiv_core::localized::LocError,
    catdiv_core::localized::DivError,
    catdiv_core::sheaf::SheafError
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "catdiv", version, about = "Categorified division at desk scale")]
pub struct Cli {
    /// The prime set S: a list like "2,3" or "<=7"
    #[arg(long, global = true, default_value = "2,3", env = "CATDIV_PRIMES")]
    pub primes: String,
    /// Largest level searched by iso, orbit and the verify suites
    #[arg(long, global = true, default_value_t = 36, env = "CATDIV_LEVEL_BOUND")]
    pub level_bound: u64,
    /// Largest digit depth used by the verify suites
    #[arg(long, global = true, default_value_t = 3, env = "CATDIV_DEPTH_BOUND")]
    pub depth_bound: usize,
    /// Seed for the randomized parts of the verify suites
    #[arg(long, global = true, default_value_t = 0, env = "CATDIV_SEED")]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: Format,
    /// Base field: "Q" or "F<p>"
    #[arg(long, global = true, default_value = "Q")]
    pub field: String,
    /// Enable the deliberately wrong fixtures (LSB action, skyscraper Homs)
    #[arg(long, global = true)]
    pub negative_controls: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Validated global settings.
#[derive(Debug, Clone, Serialize)]
pub struct Config {
    pub primes: PrimeSet,
    pub level_bound: u64,
    pub depth_bound: usize,
    pub seed: u64,
    pub format: Format,
    pub field: FieldTag,
    pub negative_controls: bool,
}

impl Config {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let primes = PrimeSet::parse(&cli.primes).map_err(|e| CliError::Parse(format!("--primes: {e}")))?;
        if cli.level_bound == 0 || cli.depth_bound == 0 {
            return Err(CliError::Parse("bounds must be positive".into()));
        }
        let field = cli.field.parse().map_err(|e| CliError::Parse(format!("--field: {e}")))?;
        Ok(Config {
            primes,
            level_bound: cli.level_bound,
            depth_bound: cli.depth_bound,
            seed: cli.seed,
            format: cli.format,
            field,
            negative_controls: cli.negative_controls,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub config: Config,
    pub status: Status,
    pub result: Value,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::Fail => 1,
        }
    }
}

/// Parses `args` (without the program name) and runs the command.
pub fn run<I, S>(args: I) -> Result<Report>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(std::iter::once("catdiv".to_string()).chain(args.iter().cloned()))
        .map_err(|e| match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        })?;
    let config = Config::from_cli(&cli)?;
    let (status, result) = commands::execute(&cli.command, &config)?;
    Ok(Report { command: args, config, status, result })
}

pub fn render(report: &Report) -> String {
    match report.config.format {
        Format::Json => serde_json::to_string_pretty(report).expect("reports serialize"),
        Format::Human => human(&report.result, 0),
    }
}

fn human(v: &Value, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::Object(_) => format!("{pad}{k}:\n{}", human(v, indent + 1)),
                Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                    let rows: Vec<String> = items.iter().map(|i| format!("{pad}  - {}", compact(i))).collect();
                    format!("{pad}{k}:\n{}", rows.join("\n"))
                }
                _ => format!("{pad}{k}: {}", compact(v)),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        _ => format!("{pad}{}", compact(v)),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        _ => v.to_string(),
    }
}
