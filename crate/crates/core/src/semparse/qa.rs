//! Template-driven question answering over parsed interpretations.
//!
//! A question is matched word for word against template patterns; the first
//! template that fits wins. Its query runs once per interpretation with the
//! interpretation's facts loaded into the session layer, plus any `given`
//! facts the template supplies under the `q_given` source. Answers report
//! the interpretation's score and the answer's probability side by side;
//! the two are never multiplied.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::rules::{PatTok, QuestionTemplate};
use super::{ground_phrase, sanitize, Interpretation};
use crate::engine::{Engine, EngineConfig, Status};
use crate::parse;
use crate::store::{KnowledgeStore, Layer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QaError {
    pub template: String,
    pub msg: String,
}

impl fmt::Display for QaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "template {}: {}", self.template, self.msg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaAnswer {
    pub interp: String,
    /// Score of the interpretation the answer came from.
    pub score: f64,
    pub text: String,
    pub prob: f64,
    pub status: Status,
    pub trace: BTreeSet<String>,
    pub sources: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaResult {
    /// Name of the matched template, `None` when nothing fit.
    pub template: Option<String>,
    pub answers: Vec<QaAnswer>,
}

impl QaResult {
    pub fn is_unknown(&self) -> bool {
        self.answers.is_empty()
    }
}

fn tokenize(question: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in question.split_whitespace() {
        let mut word = chunk.to_lowercase();
        let mut tail = Vec::new();
        while let Some(last) = word.chars().last() {
            if matches!(last, '?' | '.' | ',' | '!') {
                word.pop();
                tail.push(last.to_string());
            } else {
                break;
            }
        }
        if !word.is_empty() {
            out.push(word);
        }
        tail.reverse();
        out.extend(tail);
    }
    out
}

fn match_pattern(pattern: &[PatTok], tokens: &[String]) -> Option<BTreeMap<char, String>> {
    if pattern.len() != tokens.len() {
        return None;
    }
    let mut captures = BTreeMap::new();
    for (pat, token) in pattern.iter().zip(tokens) {
        match pat {
            PatTok::Word(w) => {
                if w != token {
                    return None;
                }
            }
            PatTok::Slot(c) => {
                if let Some(earlier) = captures.insert(*c, token.clone()) {
                    if earlier != *token {
                        return None;
                    }
                }
            }
        }
    }
    Some(captures)
}

enum Subst {
    Done(String),
    /// The interpretation holds no instance the template asked for.
    NoInstance,
}

/// Replaces `&x`, `$x` and `?name` in template text for one interpretation.
fn substitute(
    store: &KnowledgeStore,
    interp: &Interpretation,
    captures: &BTreeMap<char, String>,
    template: &str,
    text: &str,
) -> Result<Subst, QaError> {
    let bad = |msg: String| QaError { template: template.to_string(), msg };
    let mut out = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '&' | '$' => {
                let Some(slot) = chars.next_if(|n| n.is_ascii_lowercase()) else {
                    return Err(bad(format!("`{c}` needs a slot letter")));
                };
                let Some(word) = captures.get(&slot) else {
                    return Err(bad(format!("slot `{slot}` is not in the pattern")));
                };
                let grounded = ground_phrase(store, word, 1).into_iter().next();
                if c == '&' {
                    match grounded {
                        Some(concept) => out.push_str(&concept),
                        None => {
                            out.push('"');
                            out.push_str(word);
                            out.push('"');
                        }
                    }
                } else {
                    let concept = grounded.unwrap_or_else(|| sanitize(word));
                    match interp.latest_instance_of(&concept) {
                        Some(name) => out.push_str(name),
                        None => return Ok(Subst::NoInstance),
                    }
                }
            }
            '?' => {
                let mut name = String::new();
                while let Some(n) = chars.next_if(|n| n.is_ascii_alphanumeric() || *n == '_') {
                    name.push(n);
                }
                if name.is_empty() {
                    return Err(bad(String::from("`?` needs a variable name")));
                }
                out.push_str("Q_");
                out.push_str(&name);
            }
            _ => out.push(c),
        }
    }
    Ok(Subst::Done(out))
}

/// Answers a question against every interpretation in turn.
///
/// The session layer is used as scratch space and left cleared. An empty
/// answer list means the question is unknown, either because no template
/// matched or because no interpretation entailed an answer.
pub fn answer_question(
    store: &mut KnowledgeStore,
    templates: &[QuestionTemplate],
    interps: &[Interpretation],
    question: &str,
    config: &EngineConfig,
) -> Result<QaResult, QaError> {
    let tokens = tokenize(question);
    let Some((template, captures)) = templates
        .iter()
        .find_map(|t| match_pattern(&t.pattern, &tokens).map(|c| (t, c)))
    else {
        return Ok(QaResult { template: None, answers: Vec::new() });
    };
    let answer_var = format!("Q_{}", template.answer);
    let mut answers = Vec::new();
    for interp in interps {
        let query_text =
            match substitute(store, interp, &captures, &template.name, &template.query)? {
                Subst::Done(text) => text,
                Subst::NoInstance => continue,
            };
        let goals = parse::parse_query(&query_text).map_err(|e| QaError {
            template: template.name.clone(),
            msg: format!("query does not parse after substitution: {e}"),
        })?;
        let mut given = Vec::new();
        for fact in &template.given {
            let text = match substitute(store, interp, &captures, &template.name, fact)? {
                Subst::Done(text) => text,
                Subst::NoInstance => continue,
            };
            let stmt = parse::parse_statement(&format!("{text}.")).map_err(|e| QaError {
                template: template.name.clone(),
                msg: format!("given fact does not parse after substitution: {e}"),
            })?;
            given.push(stmt.with_source("q_given"));
        }
        store.clear_session();
        for fact in interp.facts.iter().cloned().chain(given) {
            store.add_statement(fact, Layer::Session).map_err(|e| QaError {
                template: template.name.clone(),
                msg: format!("session fact rejected: {e}"),
            })?;
        }
        let result = {
            let engine = Engine::new(store, config.clone());
            engine.query(&goals).map_err(|e| QaError {
                template: template.name.clone(),
                msg: format!("query failed: {e}"),
            })?
        };
        store.clear_session();
        let mut best: Vec<QaAnswer> = Vec::new();
        for answer in &result.answers {
            if answer.status != Status::Entailed {
                continue;
            }
            let Some((_, term)) = answer.bindings.iter().find(|(v, _)| *v == answer_var)
            else {
                continue;
            };
            let text = term.to_string();
            match best.iter_mut().find(|b| b.text == text) {
                Some(b) => {
                    if answer.prob > b.prob {
                        b.prob = answer.prob;
                        b.trace = answer.trace();
                        b.sources = answer.sources();
                    }
                }
                None => best.push(QaAnswer {
                    interp: interp.id.clone(),
                    score: interp.score,
                    text,
                    prob: answer.prob,
                    status: answer.status,
                    trace: answer.trace(),
                    sources: answer.sources(),
                }),
            }
        }
        best.sort_by(|a, b| b.prob.total_cmp(&a.prob).then_with(|| a.text.cmp(&b.text)));
        answers.extend(best);
    }
    Ok(QaResult { template: Some(template.name.clone()), answers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_program, Directive};
    use crate::semparse::rules::{parse_rules, parse_templates};
    use crate::semparse::{parse_passage, DepToken, SemParseOptions};
    use alloc::vec;

    fn tok(index: usize, word: &str, lemma: &str, pos: &str, dep: &str, head: isize) -> DepToken {
        DepToken {
            index,
            word: word.to_string(),
            lemma: lemma.to_string(),
            pos: pos.to_string(),
            dep: dep.to_string(),
            head,
        }
    }

    fn demo_store() -> KnowledgeStore {
        let mut store = KnowledgeStore::new();
        let text = "\
has_name(increase, \"increase\").
has_name(obstruction, \"obstruction\").
has_name(pressure, \"pressure\").
has_name(temperature, \"temperature\").
isa(pressure, phy_quantity).
isa(temperature, phy_quantity).
isa(phy_quantity, numeric).
isa(obstruction, phy_state).
:- selectional(agent, increase, sentient).
:- selectional(theme, increase, numeric).
";
        let program = parse_program(text).unwrap();
        for stmt in program.statements {
            store.add_statement(stmt, Layer::Base).unwrap();
        }
        for d in program.directives {
            if let Directive::Selectional { role, event, ty } = d {
                store.add_selectional(&role, &event, &ty);
            }
        }
        store
    }

    const DEMO_RULES: &str = "\
rule R1
  match v: pos=VERB
  produce 1.0 isa(!v, &v)

rule R2
  match v: pos=VERB
  match a: dep=nsubj head=v
  match t: dep=dobj head=v
  produce 0.9 cause($v, $a)
  produce 0.85 agent($v, $a)

rule R3
  match v: pos=VERB
  match t: dep=dobj head=v
  produce 1.0 theme($v, $t)
";

    const TEMPLATES: &str = "\
template QT1
  pattern what causes the $a to $v ?
  query isa(E, &v), theme(E, $a), cause(E, ?ans)
  answer ?ans
";

    fn walkthrough_interps(store: &KnowledgeStore) -> Vec<crate::semparse::Interpretation> {
        let rules = parse_rules(DEMO_RULES).unwrap();
        let sentence = vec![vec![
            tok(0, "An", "an", "DET", "det", 1),
            tok(1, "obstruction", "obstruction", "NOUN", "nsubj", 2),
            tok(2, "increases", "increase", "VERB", "ROOT", -1),
            tok(3, "the", "the", "DET", "det", 4),
            tok(4, "pressure", "pressure", "NOUN", "dobj", 2),
            tok(5, ".", ".", "PUNCT", "punct", 2),
        ]];
        parse_passage(store, &rules, &sentence, &SemParseOptions::default()).unwrap()
    }

    #[test]
    fn answers_carry_interp_id_and_score() {
        let mut store = demo_store();
        let interps = walkthrough_interps(&store);
        let templates = parse_templates(TEMPLATES).unwrap();
        let result = answer_question(
            &mut store,
            &templates,
            &interps,
            "What causes the pressure to increase?",
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(result.template.as_deref(), Some("QT1"));
        assert_eq!(result.answers.len(), 1);
        let a = &result.answers[0];
        assert_eq!(a.text, "obstruction_ins1");
        assert_eq!(a.prob, 1.0);
        assert_eq!(a.interp, "interp_1");
        assert!((a.score - 0.9).abs() < 1e-9);
        assert!(a.sources.contains("interp_1"));
        assert_eq!(store.session_len(), 0);
    }

    #[test]
    fn unmatched_question_is_unknown() {
        let mut store = demo_store();
        let interps = walkthrough_interps(&store);
        let templates = parse_templates(TEMPLATES).unwrap();
        let result = answer_question(
            &mut store,
            &templates,
            &interps,
            "Why is the sky blue?",
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(result.template, None);
        assert!(result.is_unknown());
    }

    #[test]
    fn missing_instance_skips_the_interpretation() {
        let mut store = demo_store();
        let interps = walkthrough_interps(&store);
        let templates = parse_templates(TEMPLATES).unwrap();
        let result = answer_question(
            &mut store,
            &templates,
            &interps,
            "What causes the temperature to increase?",
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(result.template.as_deref(), Some("QT1"));
        assert!(result.is_unknown());
    }

    #[test]
    fn given_facts_are_session_scoped() {
        let mut store = demo_store();
        let interps = walkthrough_interps(&store);
        let templates = parse_templates(
            "template QT2\n  pattern is the $a held constant ?\n  given held_constant(&a)\n  query held_constant(?which)\n  answer ?which\n",
        )
        .unwrap();
        let result = answer_question(
            &mut store,
            &templates,
            &interps,
            "Is the pressure held constant?",
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(result.answers.len(), 1);
        assert_eq!(result.answers[0].text, "pressure");
        assert!(result.answers[0].sources.contains("q_given"));
        assert_eq!(store.session_len(), 0);
    }
}
