//! `repl`: interactive querying with assertable scenario facts.
//!
//! A plain line is a query. `assert <statement.>` adds a session fact or
//! clause, `reset.` drops the session layer, `quit.` or end of input ends
//! the session. Errors are reported and the session is kept.

use crate::args::{CliError, EngineArgs, KbArgs};
use crate::formats::print_answers;
use crate::load;
use clap::Args;
use pkb_core::engine::Engine;
use pkb_core::parse::{parse_query, parse_statement};
use pkb_core::store::Layer;
use std::io::{BufRead, IsTerminal, Write};

#[derive(Debug, Args)]
pub struct ReplArgs {
    #[command(flatten)]
    pub kb: KbArgs,

    #[command(flatten)]
    pub engine: EngineArgs,
}

pub fn run(args: &ReplArgs) -> Result<(), CliError> {
    let mut store = load::load_store(&args.kb)?;
    store.seal();
    let config = args.engine.config();
    let stdin = std::io::stdin();
    let interactive = stdin.is_terminal();
    let mut input = stdin.lock();
    let mut line = String::new();
    loop {
        if interactive {
            print!("pkb> ");
            let _ = std::io::stdout().flush();
        }
        line.clear();
        match input.read_line(&mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => return Err(CliError::Input(format!("stdin: {e}"))),
        }
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let keyword = text.strip_suffix('.').unwrap_or(text).trim();
        if keyword == "quit" {
            break;
        }
        if keyword == "reset" {
            store.clear_session();
            println!("session cleared");
            continue;
        }
        if let Some(rest) = text.strip_prefix("assert ") {
            match parse_statement(rest.trim()) {
                Ok(stmt) => match store.add_statement(stmt, Layer::Session) {
                    Ok(id) => println!("asserted {id}"),
                    Err(e) => println!("error: {e}"),
                },
                Err(e) => println!("error: {e}"),
            }
            continue;
        }
        match parse_query(text) {
            Ok(goals) => match Engine::new(&store, config.clone()).query(&goals) {
                Ok(result) => {
                    print_answers(text, &result, args.engine.format, args.engine.explain)
                }
                Err(e) => println!("error: {e}"),
            },
            Err(e) => println!("error: {e}"),
        }
    }
    Ok(())
}
