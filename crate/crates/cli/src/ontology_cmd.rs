//! `ontology`: inspect and validate an ontology file.

use crate::args::CliError;
use crate::load;
use clap::{Args, Subcommand};
use pkb_core::ontology::Ontology;
use pkb_core::parse::print_statement;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct OntologyArgs {
    /// Ontology file.
    #[arg(long, value_name = "FILE")]
    pub ontology: PathBuf,

    #[command(subcommand)]
    pub action: OntologyAction,
}

#[derive(Debug, Subcommand)]
pub enum OntologyAction {
    /// Node counts and the level layout.
    Summary,
    /// One node's predicates, inherited ones included.
    Show { node: String },
    /// Print the generated inheritance clauses.
    Clauses,
    /// Validate the file; nonzero exit on any defect.
    Check,
}

pub fn run(args: &OntologyArgs) -> Result<(), CliError> {
    let (resolved, text) = load::read(&args.ontology)?;
    let label = resolved.display().to_string();
    let ontology =
        Ontology::load(&text).map_err(|e| CliError::Input(format!("{label}: {e}")))?;
    match &args.action {
        OntologyAction::Summary => summary(&ontology),
        OntologyAction::Show { node } => show(&ontology, node)?,
        OntologyAction::Clauses => {
            for clause in ontology.inheritance_clauses() {
                println!("{}", print_statement(&clause));
            }
        }
        OntologyAction::Check => {
            // Loading already validated; reaching here means no defects.
            println!("ok {label}: {} nodes", ontology.len());
        }
    }
    Ok(())
}

fn summary(ontology: &Ontology) {
    let mut by_level: BTreeMap<u32, Vec<&str>> = BTreeMap::new();
    let mut predicates = 0usize;
    for node in ontology.nodes() {
        by_level.entry(node.level).or_default().push(&node.name);
        predicates += node.predicates.len();
    }
    println!("{} nodes, {predicates} declared predicates", ontology.len());
    for (level, names) in &by_level {
        println!("level {level}: {}", names.join(", "));
    }
}

fn show(ontology: &Ontology, node: &str) -> Result<(), CliError> {
    let found = ontology
        .get(node)
        .or_else(|| ontology.get_ci(node))
        .ok_or_else(|| CliError::Input(format!("unknown node `{node}`")))?;
    println!("{} (level {})", found.name, found.level);
    if !found.parents.is_empty() {
        println!("parents: {}", found.parents.join(", "));
    }
    let effective = ontology
        .effective_predicates(&found.name)
        .map_err(|e| CliError::Input(e.to_string()))?;
    for pred in effective {
        let tag = if pred.inheritable { "" } else { " (noinherit)" };
        println!("  {}/{}  from {}{tag}", pred.name, pred.arity, pred.declared_by);
    }
    Ok(())
}
