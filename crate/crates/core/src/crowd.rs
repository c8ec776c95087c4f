//! Turning crowd rating rows into stored facts.
//!
//! Each row carries a concept, a predicate, an object and a list of ratings
//! in [-2, 2]. The mean rating buckets into a certainty level whose
//! probability the new fact carries; rows whose mean gives no certainty are
//! dropped. Objects ground through `has_name` lookups against the companion
//! knowledge, falling back to a raw phrase. Concepts are classified by
//! walking `isa` facts up to the nearest ontology node for the report.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::certainty::{score_to_certainty, CertaintyLevel};
use crate::store::{KnowledgeStore, Layer};
use crate::term::{Atom, Statement, Term};

#[derive(Debug, Clone, PartialEq)]
pub struct CrowdRow {
    pub concept: String,
    pub predicate: String,
    pub object: String,
    pub ratings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelShare {
    pub level: CertaintyLevel,
    pub count: usize,
    /// Share of the owning concept type's added facts, in percent.
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeCount {
    pub ty: String,
    /// Ontology level of the type; `None` for unclassified concepts.
    pub node_level: Option<u32>,
    pub count: usize,
    /// Certainty mix of this type's facts; percentages sum to 100.
    pub shares: Vec<LevelShare>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestReport {
    pub added: usize,
    pub dropped: usize,
    pub warnings: Vec<String>,
    /// Classified concept types of added facts, largest first, each with
    /// its distribution over certainty levels.
    pub type_counts: Vec<TypeCount>,
}

/// Ingests rows into the given layer, returning the ingest report.
pub fn ingest_rows(
    store: &mut KnowledgeStore,
    rows: &[CrowdRow],
    layer: Layer,
) -> IngestReport {
    let mut report = IngestReport::default();
    let mut classified: BTreeMap<(String, Option<u32>), [usize; 4]> = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        let row_no = i + 1;
        if row.ratings.is_empty() {
            report.warnings.push(format!("row {row_no}: no ratings, skipped"));
            continue;
        }
        if row.ratings.len() < 3 {
            report
                .warnings
                .push(format!("row {row_no}: only {} ratings", row.ratings.len()));
        }
        let mean = row.ratings.iter().sum::<f64>() / row.ratings.len() as f64;
        let level = match score_to_certainty(mean) {
            Err(e) => {
                report.warnings.push(format!("row {row_no}: {e}, skipped"));
                continue;
            }
            Ok(None) => {
                report.dropped += 1;
                continue;
            }
            Ok(Some(level)) => level,
        };
        let object = ground_object(store, &row.object);
        let ty = classify(store, &row.concept);
        let stmt = Statement::fact(
            Atom::new(
                row.predicate.clone(),
                alloc::vec![Term::Symbol(row.concept.clone()), object],
            ),
            level.prob(),
        )
        .with_source("crowd");
        match store.add_statement(stmt, layer) {
            Ok(_) => {
                report.added += 1;
                let slot = CertaintyLevel::ALL.iter().position(|l| *l == level).unwrap();
                classified.entry(ty).or_insert([0; 4])[slot] += 1;
            }
            Err(e) => report.warnings.push(format!("row {row_no}: {e}, skipped")),
        }
    }
    let mut counts: Vec<TypeCount> = classified
        .into_iter()
        .map(|((ty, node_level), by_level)| {
            let count: usize = by_level.iter().sum();
            let shares = CertaintyLevel::ALL
                .iter()
                .zip(by_level)
                .filter(|(_, c)| *c > 0)
                .map(|(&level, c)| LevelShare {
                    level,
                    count: c,
                    percent: 100.0 * c as f64 / count as f64,
                })
                .collect();
            TypeCount { ty, node_level, count, shares }
        })
        .collect();
    counts.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.ty.cmp(&b.ty)));
    report.type_counts = counts;
    report
}

/// Resolves an object string to the entity it names, if exactly known.
fn ground_object(store: &KnowledgeStore, object: &str) -> Term {
    for stmt in store.lookup("has_name", 2) {
        if stmt.is_fact() && stmt.prob > 0.0 {
            if let (Term::Symbol(entity), Term::Phrase(name)) =
                (&stmt.head.args[0], &stmt.head.args[1])
            {
                if name == object {
                    return Term::Symbol(entity.clone());
                }
            }
        }
    }
    Term::Phrase(String::from(object))
}

/// Nearest ontology node reachable from the concept over `isa` facts.
fn classify(store: &KnowledgeStore, concept: &str) -> (String, Option<u32>) {
    let Some(ontology) = store.ontology() else {
        return (String::from("unclassified"), None);
    };
    let mut frontier = alloc::vec![String::from(concept)];
    let mut seen: BTreeSet<String> = frontier.iter().cloned().collect();
    while !frontier.is_empty() {
        for name in &frontier {
            if let Some(node) = ontology.get_ci(name) {
                return (node.name.clone(), Some(node.level));
            }
        }
        let mut next = Vec::new();
        for name in &frontier {
            for stmt in store.lookup("isa", 2) {
                if !stmt.is_fact() || stmt.prob == 0.0 {
                    continue;
                }
                if let (Term::Symbol(child), Term::Symbol(parent)) =
                    (&stmt.head.args[0], &stmt.head.args[1])
                {
                    if child == name && seen.insert(parent.clone()) {
                        next.push(parent.clone());
                    }
                }
            }
        }
        frontier = next;
    }
    (String::from("unclassified"), None)
}
