//! Input file resolution and knowledge store assembly.
//!
//! Paths are taken as given when they exist; otherwise each directory in
//! the colon-separated `PKB_PATH` environment variable is tried in order.

use crate::args::{CliError, KbArgs};
use pkb_core::ontology::Ontology;
use pkb_core::parse::{parse_program, Directive};
use pkb_core::store::{KnowledgeStore, Layer};
use std::path::{Path, PathBuf};

pub fn resolve(path: &Path) -> Result<PathBuf, CliError> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if path.is_relative() {
        if let Ok(dirs) = std::env::var("PKB_PATH") {
            for dir in dirs.split(':').filter(|d| !d.is_empty()) {
                let candidate = Path::new(dir).join(path);
                if candidate.exists() {
                    return Ok(candidate);
                }
            }
        }
    }
    Err(CliError::Input(format!("cannot find `{}`", path.display())))
}

pub fn read(path: &Path) -> Result<(PathBuf, String), CliError> {
    let resolved = resolve(path)?;
    match std::fs::read_to_string(&resolved) {
        Ok(text) => Ok((resolved, text)),
        Err(e) => Err(CliError::Input(format!("{}: {e}", resolved.display()))),
    }
}

/// Loads every `--kb` file and the ontology into a fresh store. The base
/// layer is left unsealed so callers can add to it before querying.
pub fn load_store(args: &KbArgs) -> Result<KnowledgeStore, CliError> {
    let mut store = KnowledgeStore::new();
    for path in &args.kb {
        let (resolved, text) = read(path)?;
        let label = resolved.display().to_string();
        let program =
            parse_program(&text).map_err(|e| CliError::Input(format!("{label}: {e}")))?;
        for stmt in program.statements {
            store
                .add_statement(stmt, Layer::Base)
                .map_err(|e| CliError::Input(format!("{label}: {e}")))?;
        }
        for directive in program.directives {
            if let Directive::Selectional { role, event, ty } = directive {
                store.add_selectional(&role, &event, &ty);
            }
        }
    }
    if let Some(path) = &args.ontology {
        let (resolved, text) = read(path)?;
        let ontology = Ontology::load(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", resolved.display())))?;
        store.set_ontology(ontology);
    }
    Ok(store)
}
