//! Corpus file reading and answer rendering for both output formats.

use crate::args::{CliError, OutFormat};
use pkb_core::engine::{format_prob, format_proof, QueryResult};
use pkb_core::semparse::DepToken;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// A dependency-parsed passage: one token list per sentence. `head` is a
/// token index within the same sentence, `-1` on the root.
#[derive(Debug, Deserialize)]
pub struct CorpusDoc {
    pub passage: String,
    pub sentences: Vec<Vec<CorpusToken>>,
}

#[derive(Debug, Deserialize)]
pub struct CorpusToken {
    pub index: usize,
    pub word: String,
    pub lemma: String,
    pub pos: String,
    pub dep: String,
    pub head: isize,
}

impl CorpusDoc {
    pub fn load(path: &Path) -> Result<CorpusDoc, CliError> {
        let (resolved, text) = crate::load::read(path)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", resolved.display())))
    }

    pub fn tokens(&self) -> Vec<Vec<DepToken>> {
        self.sentences
            .iter()
            .map(|sentence| {
                sentence
                    .iter()
                    .map(|t| DepToken {
                        index: t.index,
                        word: t.word.clone(),
                        lemma: t.lemma.clone(),
                        pos: t.pos.clone(),
                        dep: t.dep.clone(),
                        head: t.head,
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Serialize)]
struct ProofRecord {
    prob: String,
    ids: Vec<String>,
    sources: Vec<String>,
}

#[derive(Debug, Serialize)]
struct AnswerRecord<'a> {
    query: &'a str,
    bindings: BTreeMap<&'a str, String>,
    prob: String,
    status: &'static str,
    possibly_incomplete: bool,
    proofs: Vec<ProofRecord>,
}

/// Prints one query result. Text mode gives one line per answer with an
/// optional proof tree; structured mode gives one JSON record per answer,
/// and a single `unknown` record when there are none.
pub fn print_answers(query: &str, result: &QueryResult, format: OutFormat, explain: bool) {
    match format {
        OutFormat::Text => print_text(result, explain),
        OutFormat::Structured => print_structured(query, result),
    }
}

fn print_text(result: &QueryResult, explain: bool) {
    if result.answers.is_empty() {
        println!("unknown");
    }
    for answer in &result.answers {
        let mut line = String::new();
        for (var, term) in &answer.bindings {
            if !line.is_empty() {
                line.push_str(", ");
            }
            line.push_str(&format!("{var} = {term}"));
        }
        if !line.is_empty() {
            line.push_str("  ");
        }
        println!("{line}p={}  {}", format_prob(answer.prob), answer.status.as_str());
        if explain {
            for proof in &answer.proofs {
                print!("{}", format_proof(proof));
            }
        }
    }
    if result.possibly_incomplete {
        println!("note: search limits hit, listing may be incomplete");
    }
}

fn print_structured(query: &str, result: &QueryResult) {
    if result.answers.is_empty() {
        let record = AnswerRecord {
            query,
            bindings: BTreeMap::new(),
            prob: String::from("0"),
            status: "unknown",
            possibly_incomplete: result.possibly_incomplete,
            proofs: Vec::new(),
        };
        println!("{}", serde_json::to_string(&record).expect("record is serializable"));
        return;
    }
    for answer in &result.answers {
        let record = AnswerRecord {
            query,
            bindings: answer
                .bindings
                .iter()
                .map(|(v, t)| (v.as_str(), t.to_string()))
                .collect(),
            prob: format_prob(answer.prob),
            status: answer.status.as_str(),
            possibly_incomplete: result.possibly_incomplete,
            proofs: answer
                .proofs
                .iter()
                .map(|p| ProofRecord {
                    prob: format_prob(p.prob),
                    ids: p.used.iter().cloned().collect(),
                    sources: p.sources.iter().cloned().collect(),
                })
                .collect(),
        };
        println!("{}", serde_json::to_string(&record).expect("record is serializable"));
    }
}
