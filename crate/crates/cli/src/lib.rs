//! Command-line front end for the sideband tunneling solver.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use floquet_tunnel::Error as CoreError;

pub const GENERATED_BY: &str = concat!("floquet-tunnel ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { name, reason } => CliError::Config(format!("{name}: {reason}")),
            CoreError::Domain { .. } | CoreError::Regime(_) | CoreError::Resolution { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "floquet-tunnel", version, about = "Sideband tunneling through a driven barrier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads for scans.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sideband amplitudes at one incident energy.
    Spectrum(Common),
    /// Activation-energy curve over an energy range, with refined minima.
    #[command(alias = "resonances")]
    Scan(Common),
    /// Exact amplitudes next to the Airy approximation.
    Compare(Common),
    /// Runs the invariant checks.
    Validate(Common),
    /// Wave-packet run through the driven barrier.
    Oracle(Common),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Spectrum(c)
            | Command::Scan(c)
            | Command::Compare(c)
            | Command::Validate(c)
            | Command::Oracle(c) => c,
        }
    }
}

/// Runs one command and returns the written files.
pub fn run(command: &Command) -> Result<Vec<PathBuf>, CliError> {
    let common = command.common();
    let text = std::fs::read_to_string(&common.config).map_err(|e| {
        CliError::Config(format!("cannot read {}: {e}", common.config.display()))
    })?;
    let config = config::RunConfig::from_json(&text)?;
    let dir = common
        .out
        .clone()
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    if common.jobs == Some(0) {
        return Err(CliError::Config("--jobs: must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    pool.install(|| match command {
        Command::Spectrum(_) => commands::spectrum(&config, &dir),
        Command::Scan(_) => commands::scan(&config, &dir),
        Command::Compare(_) => commands::compare(&config, &dir),
        Command::Validate(_) => commands::validate(&config, &dir),
        Command::Oracle(_) => commands::oracle(&config, &dir),
    })
}
