//! `ingest`: turn crowd rating rows into a knowledge file.
//!
//! The CSV carries `concept,predicate,object` followed by rating columns;
//! empty rating cells are absent ratings. Companion `--kb` files supply
//! `has_name` facts for object grounding and `isa` facts for the report's
//! concept classification. New facts go through the session layer so
//! exactly they, and nothing from the companions, reach the output file.

use crate::args::{CliError, KbArgs};
use crate::load;
use clap::Args;
use pkb_core::crowd::{ingest_rows, CrowdRow, IngestReport};
use pkb_core::parse::print_statement;
use pkb_core::store::Layer;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Rating table CSV.
    pub csv: PathBuf,

    #[command(flatten)]
    pub kb: KbArgs,

    /// Knowledge file to write.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

pub fn run(args: &IngestArgs) -> Result<(), CliError> {
    let mut store = load::load_store(&args.kb)?;
    let (resolved, _) = load::read(&args.csv)?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(&resolved)
        .map_err(|e| CliError::Input(format!("{}: {e}", resolved.display())))?;
    let mut rows = Vec::new();
    let mut csv_warnings = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", resolved.display())))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let mut fields = record.iter();
        let (Some(concept), Some(predicate), Some(object)) =
            (fields.next(), fields.next(), fields.next())
        else {
            csv_warnings.push(format!("line {line}: short row skipped"));
            continue;
        };
        let mut ratings = Vec::new();
        let mut bad_cell = None;
        for cell in fields {
            let cell = cell.trim();
            if cell.is_empty() {
                continue;
            }
            match cell.parse::<f64>() {
                Ok(r) => ratings.push(r),
                Err(_) => {
                    bad_cell = Some(cell.to_string());
                    break;
                }
            }
        }
        if let Some(cell) = bad_cell {
            csv_warnings.push(format!("line {line}: unreadable rating `{cell}`, row skipped"));
            continue;
        }
        rows.push(CrowdRow {
            concept: concept.trim().to_string(),
            predicate: predicate.trim().to_string(),
            object: object.trim().to_string(),
            ratings,
        });
    }
    let report = ingest_rows(&mut store, &rows, Layer::Session);
    let mut text = String::new();
    for stmt in store.session_statements() {
        let mut fact = stmt.clone();
        fact.id.clear();
        text.push_str(&print_statement(&fact));
        text.push('\n');
    }
    std::fs::write(&args.out, text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.out.display())))?;
    print_report(&report, &csv_warnings);
    println!("wrote {} facts to {}", report.added, args.out.display());
    Ok(())
}

fn print_report(report: &IngestReport, csv_warnings: &[String]) {
    println!("added {}, dropped {}", report.added, report.dropped);
    for w in csv_warnings {
        println!("warning: {w}");
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    if !report.type_counts.is_empty() {
        println!("certainty mix by concept type:");
    }
    for ty in &report.type_counts {
        match ty.node_level {
            Some(level) => println!("  {} (level {level}): {} facts", ty.ty, ty.count),
            None => println!("  {}: {} facts", ty.ty, ty.count),
        }
        for share in &ty.shares {
            println!("    {} {:.1}% ({})", share.level, share.percent, share.count);
        }
    }
}
