//! Command-line front end: `compile`, `simulate` and `entropy` runs driven
//! by a TOML configuration file.

pub mod angle;
pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use commands::run;

#[derive(Debug, Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Compile quantum walks into three-waveplate patterns and simulate them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the configuration's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Continue past feasibility hard-fails.
    #[arg(long)]
    pub force: bool,
    /// Overrides the configuration's stage count.
    #[arg(long)]
    pub stages: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile the walk into plate patterns and a feasibility report.
    Compile(RunArgs),
    /// Run the optical pipeline and compare it with the lattice oracle.
    Simulate(RunArgs),
    /// Entanglement-entropy ensembles.
    Entropy(RunArgs),
}

impl Command {
    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Compile(a) | Command::Simulate(a) | Command::Entropy(a) => a,
        }
    }
}

pub mod exit {
    pub const IO: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const FEASIBILITY: u8 = 3;
    pub const VERIFICATION: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("feasibility check failed: {0}")]
    Feasibility(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] qwalk_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use qwalk_core::Error as E;
        match self {
            CliError::Io { .. } => exit::IO,
            CliError::Config(_) => exit::CONFIG,
            CliError::Feasibility(_) => exit::FEASIBILITY,
            CliError::Verification(_) => exit::VERIFICATION,
            CliError::Core(e) => match e {
                E::Io(_) => exit::IO,
                E::BranchSelection { .. } | E::GridTooCoarse { .. } => exit::FEASIBILITY,
                E::Reconstruction { .. }
                | E::NotUnitary { .. }
                | E::UnphysicalStokes { .. }
                | E::Measurement(_)
                | E::ZeroIntensity
                | E::SpotOutOfBounds { .. } => exit::VERIFICATION,
                _ => exit::CONFIG,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
