//! Flag bundles shared by several subcommands, and the process error type.

use clap::{Args, ValueEnum};
use pkb_core::engine::{EngineConfig, DEFAULT_DEPTH_LIMIT};
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct KbArgs {
    /// Knowledge file to load; repeat for several.
    #[arg(long = "kb", value_name = "FILE")]
    pub kb: Vec<PathBuf>,

    /// Ontology file.
    #[arg(long, value_name = "FILE")]
    pub ontology: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    /// Proof depth limit.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_DEPTH_LIMIT)]
    pub depth: usize,

    /// Keep only the N most probable answers.
    #[arg(long, value_name = "N")]
    pub top: Option<usize>,

    /// Print a proof tree under each answer.
    #[arg(long)]
    pub explain: bool,

    /// Output format.
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    pub format: OutFormat,
}

impl EngineArgs {
    pub fn config(&self) -> EngineConfig {
        EngineConfig { depth_limit: self.depth, answer_limit: self.top, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    /// Human-readable lines.
    Text,
    /// One JSON record per line, byte-stable across runs.
    Structured,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}
