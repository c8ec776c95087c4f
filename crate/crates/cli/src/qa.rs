//! `qa`: parse passages with mapping rules and answer questions about them.

use crate::args::{CliError, EngineArgs, KbArgs, OutFormat};
use crate::formats::CorpusDoc;
use crate::load;
use clap::Args;
use pkb_core::parse::print_statement;
use pkb_core::semparse::qa::answer_question;
use pkb_core::semparse::rules::{parse_rules, parse_templates, MappingRule, QuestionTemplate};
use pkb_core::semparse::{parse_passage, Interpretation, SemParseOptions};
use pkb_core::store::KnowledgeStore;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct QaArgs {
    /// Questions to answer; none means report the final beams only.
    pub questions: Vec<String>,

    #[command(flatten)]
    pub kb: KbArgs,

    /// Mapping rules file.
    #[arg(long, value_name = "FILE")]
    pub rules: PathBuf,

    /// Question template file.
    #[arg(long, value_name = "FILE")]
    pub templates: Option<PathBuf>,

    /// Dependency-parsed passage, repeatable.
    #[arg(long = "corpus", value_name = "FILE", required = true)]
    pub corpus: Vec<PathBuf>,

    /// Beam width for interpretations.
    #[arg(long, value_name = "N", default_value_t = 3)]
    pub k: usize,

    /// Discard readings that break selectional restrictions (default).
    #[arg(long, conflicts_with = "lenient")]
    pub strict: bool,

    /// Keep restriction-breaking readings at a score penalty.
    #[arg(long)]
    pub lenient: bool,

    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Serialize)]
struct InterpRecord<'a> {
    corpus: String,
    interp: &'a str,
    score: String,
    rules: Vec<&'a str>,
    facts: Vec<String>,
}

#[derive(Debug, Serialize)]
struct QaRecord<'a> {
    corpus: String,
    question: &'a str,
    template: Option<&'a str>,
    answer: Option<&'a str>,
    prob: String,
    status: &'static str,
    interp: Option<&'a str>,
    score: Option<String>,
    trace: Vec<String>,
    sources: Vec<String>,
}

pub fn run(args: &QaArgs) -> Result<(), CliError> {
    let mut store = load::load_store(&args.kb)?;
    store.seal();
    let (rules_path, rules_text) = load::read(&args.rules)?;
    let rules = parse_rules(&rules_text)
        .map_err(|e| CliError::Input(format!("{}: {e}", rules_path.display())))?;
    let templates = match &args.templates {
        Some(path) => {
            let (resolved, text) = load::read(path)?;
            parse_templates(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", resolved.display())))?
        }
        None => Vec::new(),
    };
    if !args.questions.is_empty() && templates.is_empty() {
        return Err(CliError::Usage(String::from(
            "questions need --templates with at least one template",
        )));
    }
    let opts = SemParseOptions { beam: args.k, strict: !args.lenient, ..Default::default() };
    for path in &args.corpus {
        run_document(&mut store, args, &rules, &templates, &opts, path)?;
    }
    Ok(())
}

fn run_document(
    store: &mut KnowledgeStore,
    args: &QaArgs,
    rules: &[MappingRule],
    templates: &[QuestionTemplate],
    opts: &SemParseOptions,
    path: &PathBuf,
) -> Result<(), CliError> {
    let doc = CorpusDoc::load(path)?;
    let label = path.display().to_string();
    let interps = parse_passage(store, rules, &doc.tokens(), opts)
        .map_err(|e| CliError::Input(format!("{label}: {e}")))?;
    let text_mode = args.engine.format == OutFormat::Text;
    if text_mode {
        println!("== {label}");
        println!("passage: {}", doc.passage);
    }
    if args.questions.is_empty() || args.engine.explain {
        print_beam(&label, &interps, args.engine.format);
    }
    let config = args.engine.config();
    for question in &args.questions {
        let result = answer_question(store, templates, &interps, question, &config)
            .map_err(|e| CliError::Input(format!("{label}: {e}")))?;
        if text_mode {
            println!("Q: {question}");
            if result.is_unknown() {
                println!("A: unknown");
            }
            for a in &result.answers {
                println!(
                    "A: {}  p={}  {}  interp={}  score={}  trace={{{}}}  sources={{{}}}",
                    a.text,
                    pkb_core::engine::format_prob(a.prob),
                    a.status.as_str(),
                    a.interp,
                    pkb_core::engine::format_prob(a.score),
                    join(&a.trace),
                    join(&a.sources),
                );
            }
        } else {
            print_qa_records(&label, question, &result);
        }
    }
    Ok(())
}

fn print_beam(label: &str, interps: &[Interpretation], format: OutFormat) {
    for interp in interps {
        match format {
            OutFormat::Text => {
                println!(
                    "{}  score={}  rules={}",
                    interp.id,
                    pkb_core::engine::format_prob(interp.score),
                    interp.fired.iter().cloned().collect::<Vec<_>>().join(","),
                );
                for fact in &interp.facts {
                    println!("  {}", print_statement(fact));
                }
            }
            OutFormat::Structured => {
                let record = InterpRecord {
                    corpus: label.to_string(),
                    interp: &interp.id,
                    score: pkb_core::engine::format_prob(interp.score),
                    rules: interp.fired.iter().map(String::as_str).collect(),
                    facts: interp.facts.iter().map(print_statement).collect(),
                };
                println!("{}", serde_json::to_string(&record).expect("record is serializable"));
            }
        }
    }
}

fn print_qa_records(label: &str, question: &str, result: &pkb_core::semparse::qa::QaResult) {
    if result.is_unknown() {
        let record = QaRecord {
            corpus: label.to_string(),
            question,
            template: result.template.as_deref(),
            answer: None,
            prob: String::from("0"),
            status: "unknown",
            interp: None,
            score: None,
            trace: Vec::new(),
            sources: Vec::new(),
        };
        println!("{}", serde_json::to_string(&record).expect("record is serializable"));
        return;
    }
    for a in &result.answers {
        let record = QaRecord {
            corpus: label.to_string(),
            question,
            template: result.template.as_deref(),
            answer: Some(&a.text),
            prob: pkb_core::engine::format_prob(a.prob),
            status: a.status.as_str(),
            interp: Some(&a.interp),
            score: Some(pkb_core::engine::format_prob(a.score)),
            trace: a.trace.iter().cloned().collect(),
            sources: a.sources.iter().cloned().collect(),
        };
        println!("{}", serde_json::to_string(&record).expect("record is serializable"));
    }
}

fn join(set: &std::collections::BTreeSet<String>) -> String {
    set.iter().cloned().collect::<Vec<_>>().join(",")
}
