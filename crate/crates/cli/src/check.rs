//! `check`: parse and validate knowledge files without querying them.
//!
//! Files are linted one at a time, each into its own store, so two files
//! that reuse an id are both fine on their own; whether they can load
//! together is the loading command's concern.

use crate::args::{CliError, KbArgs};
use crate::load;
use clap::Args;
use pkb_core::ontology::Ontology;
use pkb_core::parse::parse_program;
use pkb_core::store::{KnowledgeStore, Layer};

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub kb: KbArgs,
}

pub fn run(args: &CheckArgs) -> Result<(), CliError> {
    if args.kb.kb.is_empty() && args.kb.ontology.is_none() {
        return Err(CliError::Usage(String::from(
            "nothing to check; pass --kb and/or --ontology",
        )));
    }
    let mut failed = 0usize;
    for path in &args.kb.kb {
        let (resolved, text) = load::read(path)?;
        let label = resolved.display().to_string();
        let mut store = KnowledgeStore::new();
        match parse_program(&text) {
            Ok(program) => {
                let directives = program.directives.len();
                let mut statements = 0usize;
                let mut ok = true;
                for stmt in program.statements {
                    match store.add_statement(stmt, Layer::Base) {
                        Ok(_) => statements += 1,
                        Err(e) => {
                            println!("error {label}: {e}");
                            ok = false;
                        }
                    }
                }
                if ok {
                    println!("ok {label}: {statements} statements, {directives} directives");
                } else {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("error {label}: {e}");
                failed += 1;
            }
        }
    }
    if let Some(path) = &args.kb.ontology {
        let (resolved, text) = load::read(path)?;
        let label = resolved.display().to_string();
        match Ontology::load(&text) {
            Ok(ontology) => println!("ok {label}: {} nodes", ontology.len()),
            Err(e) => {
                println!("error {label}: {e}");
                failed += 1;
            }
        }
    }
    if failed > 0 {
        return Err(CliError::Input(format!("{failed} file(s) failed validation")));
    }
    Ok(())
}
