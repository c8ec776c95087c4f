//! Command-line front end for the pkb knowledge engine.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::process::ExitCode;

mod args;
mod check;
mod formats;
mod ingest;
mod load;
mod ontology_cmd;
mod qa;
mod query;
mod repl;

use args::CliError;

/// Panics inside the core are invariant failures, not input problems;
/// they map to their own exit code.
fn dispatch(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Check(args) => check::run(args),
        Command::Query(args) => query::run(args),
        Command::Repl(args) => repl::run(args),
        Command::Ingest(args) => ingest::run(args),
        Command::Qa(args) => qa::run(args),
        Command::Ontology(args) => ontology_cmd::run(args),
    }
}

#[derive(Debug, Parser)]
#[command(name = "pkb", about = "Probabilistic commonsense knowledge engine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate knowledge files.
    Check(check::CheckArgs),
    /// Run one query and print its answers.
    Query(query::QueryArgs),
    /// Interactive session with assertable scenario facts.
    Repl(repl::ReplArgs),
    /// Turn crowd rating rows into a knowledge file.
    Ingest(ingest::IngestArgs),
    /// Parse passages and answer questions about them.
    Qa(qa::QaArgs),
    /// Inspect an ontology file.
    Ontology(ontology_cmd::OntologyArgs),
}

/// Rust spawns with SIGPIPE ignored, which turns a closed pipe into a
/// print panic. Restore the default so `pkb ... | head` ends quietly.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            let _ = e.print();
            return match kind {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = std::panic::catch_unwind(|| dispatch(&cli.command)).unwrap_or_else(|_| {
        Err(CliError::Internal(String::from("invariant failure, see panic message above")))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
