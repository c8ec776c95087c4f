//! Parsers for mapping rule files and question template files.
//!
//! Mapping rules are written one per block:
//!
//! ```plain
//! rule R2
//!   match v: pos=VERB
//!   match a: dep=nsubj head=v
//!   match t: dep=dobj head=v
//!   produce 0.9 cause($v, $a)
//!   produce 0.85 agent($v, $a)
//! ```
//!
//! Each `match` line names a slot and constrains the token it binds; `head=`
//! refers back to an earlier slot. A `no` line is a negative guard with the
//! same keys and no slot. Productions are mutually exclusive readings; their
//! arguments name slots with a mode sigil: `!s` mints a fresh instance, `$s`
//! resolves an instance through the determiner rule, `&s` grounds the lemma
//! to a concept, `~s` keeps the raw word as a phrase.
//!
//! Question templates follow the same layout:
//!
//! ```plain
//! template QT1
//!   pattern what causes the $a to $v ?
//!   given constant_concept(&a)
//!   query isa(E, &v), theme(E, $a), cause(E, ?ans)
//!   answer ?ans
//! ```
//!
//! Pattern words match literally and `$x` captures one word. The optional
//! `given` facts and the `query` keep their slot sigils as written; they are
//! substituted per interpretation before parsing.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for RuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

/// Constraints one token must satisfy to bind a slot.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SlotConstraint {
    pub slot: char,
    pub dep: Option<String>,
    pub head: Option<char>,
    pub pos: Option<String>,
    pub lemma: Option<String>,
}

/// A guard that must match no token for the rule to apply.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NegConstraint {
    pub dep: Option<String>,
    pub head: Option<char>,
    pub pos: Option<String>,
    pub lemma: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgMode {
    Fresh,
    Instance,
    Concept,
    Phrase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgSpec {
    pub mode: ArgMode,
    pub slot: char,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Production {
    pub confidence: f64,
    pub pred: String,
    pub args: Vec<ArgSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingRule {
    pub name: String,
    pub slots: Vec<SlotConstraint>,
    pub guards: Vec<NegConstraint>,
    pub productions: Vec<Production>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatTok {
    Word(String),
    Slot(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionTemplate {
    pub name: String,
    pub pattern: Vec<PatTok>,
    /// Facts asserted for the query's duration, still holding slot sigils.
    pub given: Vec<String>,
    /// Query text with slot sigils and the `?ans` placeholder.
    pub query: String,
    pub answer: String,
}

fn fail<T>(line: usize, msg: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError { line, msg: msg.into() })
}

fn slot_char(line: usize, s: &str) -> Result<char, RuleError> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => Ok(c),
        _ => fail(line, format!("slot must be one lowercase letter, got `{s}`")),
    }
}

/// Splits `key=value` fields, filling a constraint.
fn parse_fields(
    line_no: usize,
    fields: &str,
    slot: Option<char>,
    known: &[char],
) -> Result<(Option<String>, Option<char>, Option<String>, Option<String>), RuleError> {
    let mut dep = None;
    let mut head = None;
    let mut pos = None;
    let mut lemma = None;
    for field in fields.split_whitespace() {
        let Some((key, value)) = field.split_once('=') else {
            return fail(line_no, format!("expected key=value, got `{field}`"));
        };
        match key {
            "dep" => dep = Some(value.to_string()),
            "head" => {
                let h = slot_char(line_no, value)?;
                if Some(h) == slot {
                    return fail(line_no, format!("slot `{h}` cannot be its own head"));
                }
                if !known.contains(&h) {
                    return fail(line_no, format!("head refers to unknown slot `{h}`"));
                }
                head = Some(h);
            }
            "pos" => pos = Some(value.to_string()),
            "lemma" => lemma = Some(value.to_string()),
            _ => return fail(line_no, format!("unknown field `{key}`")),
        }
    }
    Ok((dep, head, pos, lemma))
}

fn parse_production(line_no: usize, rest: &str, known: &[char]) -> Result<Production, RuleError> {
    let Some((conf_text, call)) = rest.trim().split_once(char::is_whitespace) else {
        return fail(line_no, "expected `produce <confidence> <pred>(<args>)`");
    };
    let confidence: f64 = match conf_text.parse() {
        Ok(c) => c,
        Err(_) => return fail(line_no, format!("bad confidence `{conf_text}`")),
    };
    if !(0.0..=1.0).contains(&confidence) {
        return fail(line_no, format!("confidence {confidence} outside [0, 1]"));
    }
    let call = call.trim();
    let Some(open) = call.find('(') else {
        return fail(line_no, format!("expected `(` in production `{call}`"));
    };
    if !call.ends_with(')') {
        return fail(line_no, format!("expected `)` to close production `{call}`"));
    }
    let pred = call[..open].trim();
    if pred.is_empty() || !pred.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return fail(line_no, format!("bad predicate name `{pred}`"));
    }
    let mut args = Vec::new();
    for arg in call[open + 1..call.len() - 1].split(',') {
        let arg = arg.trim();
        let mut chars = arg.chars();
        let mode = match chars.next() {
            Some('!') => ArgMode::Fresh,
            Some('$') => ArgMode::Instance,
            Some('&') => ArgMode::Concept,
            Some('~') => ArgMode::Phrase,
            _ => return fail(line_no, format!("argument `{arg}` needs a mode sigil")),
        };
        let slot = slot_char(line_no, chars.as_str())?;
        if !known.contains(&slot) {
            return fail(line_no, format!("argument refers to unknown slot `{slot}`"));
        }
        args.push(ArgSpec { mode, slot });
    }
    if args.is_empty() {
        return fail(line_no, "production needs at least one argument");
    }
    Ok(Production { confidence, pred: pred.to_string(), args })
}

/// Parses a mapping rule file.
pub fn parse_rules(text: &str) -> Result<Vec<MappingRule>, RuleError> {
    let mut rules: Vec<MappingRule> = Vec::new();
    let mut current: Option<MappingRule> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('%') {
            Some(at) => raw[..at].trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        let (kind, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match kind {
            "rule" => {
                if let Some(done) = current.take() {
                    finish_rule(line_no, done, &mut rules)?;
                }
                let name = rest.trim();
                if name.is_empty() {
                    return fail(line_no, "rule needs a name");
                }
                current = Some(MappingRule {
                    name: name.to_string(),
                    slots: Vec::new(),
                    guards: Vec::new(),
                    productions: Vec::new(),
                });
            }
            "match" => {
                let Some(rule) = current.as_mut() else {
                    return fail(line_no, "`match` outside a rule");
                };
                if !rule.productions.is_empty() {
                    return fail(line_no, "`match` after `produce`");
                }
                let Some((slot_text, fields)) = rest.split_once(':') else {
                    return fail(line_no, "expected `match <slot>: <fields>`");
                };
                let slot = slot_char(line_no, slot_text.trim())?;
                let known: Vec<char> = rule.slots.iter().map(|s| s.slot).collect();
                if known.contains(&slot) {
                    return fail(line_no, format!("duplicate slot `{slot}`"));
                }
                let (dep, head, pos, lemma) = parse_fields(line_no, fields, Some(slot), &known)?;
                rule.slots.push(SlotConstraint { slot, dep, head, pos, lemma });
            }
            "no" => {
                let Some(rule) = current.as_mut() else {
                    return fail(line_no, "`no` outside a rule");
                };
                let known: Vec<char> = rule.slots.iter().map(|s| s.slot).collect();
                let (dep, head, pos, lemma) = parse_fields(line_no, rest, None, &known)?;
                rule.guards.push(NegConstraint { dep, head, pos, lemma });
            }
            "produce" => {
                let Some(rule) = current.as_mut() else {
                    return fail(line_no, "`produce` outside a rule");
                };
                let known: Vec<char> = rule.slots.iter().map(|s| s.slot).collect();
                rule.productions.push(parse_production(line_no, rest, &known)?);
            }
            other => return fail(line_no, format!("unexpected `{other}`")),
        }
    }
    if let Some(done) = current.take() {
        finish_rule(text.lines().count(), done, &mut rules)?;
    }
    Ok(rules)
}

fn finish_rule(
    line_no: usize,
    rule: MappingRule,
    rules: &mut Vec<MappingRule>,
) -> Result<(), RuleError> {
    if rule.slots.is_empty() {
        return fail(line_no, format!("rule {} has no match lines", rule.name));
    }
    if rule.productions.is_empty() {
        return fail(line_no, format!("rule {} has no productions", rule.name));
    }
    if rules.iter().any(|r| r.name == rule.name) {
        return fail(line_no, format!("duplicate rule name {}", rule.name));
    }
    rules.push(rule);
    Ok(())
}

/// Parses a question template file.
pub fn parse_templates(text: &str) -> Result<Vec<QuestionTemplate>, RuleError> {
    let mut templates: Vec<QuestionTemplate> = Vec::new();
    let mut current: Option<QuestionTemplate> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('%') {
            Some(at) => raw[..at].trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        let (kind, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kind {
            "template" => {
                if let Some(done) = current.take() {
                    finish_template(line_no, done, &mut templates)?;
                }
                if rest.is_empty() {
                    return fail(line_no, "template needs a name");
                }
                current = Some(QuestionTemplate {
                    name: rest.to_string(),
                    pattern: Vec::new(),
                    given: Vec::new(),
                    query: String::new(),
                    answer: String::new(),
                });
            }
            "pattern" => {
                let Some(t) = current.as_mut() else {
                    return fail(line_no, "`pattern` outside a template");
                };
                for word in rest.split_whitespace() {
                    if let Some(slot_text) = word.strip_prefix('$') {
                        t.pattern.push(PatTok::Slot(slot_char(line_no, slot_text)?));
                    } else {
                        t.pattern.push(PatTok::Word(word.to_lowercase()));
                    }
                }
                if t.pattern.is_empty() {
                    return fail(line_no, "pattern needs at least one token");
                }
            }
            "given" => {
                let Some(t) = current.as_mut() else {
                    return fail(line_no, "`given` outside a template");
                };
                t.given.push(rest.to_string());
            }
            "query" => {
                let Some(t) = current.as_mut() else {
                    return fail(line_no, "`query` outside a template");
                };
                t.query = rest.to_string();
            }
            "answer" => {
                let Some(t) = current.as_mut() else {
                    return fail(line_no, "`answer` outside a template");
                };
                let Some(var) = rest.strip_prefix('?') else {
                    return fail(line_no, "answer must be a `?var`");
                };
                t.answer = var.to_string();
            }
            other => return fail(line_no, format!("unexpected `{other}`")),
        }
    }
    if let Some(done) = current.take() {
        finish_template(text.lines().count(), done, &mut templates)?;
    }
    Ok(templates)
}

fn finish_template(
    line_no: usize,
    t: QuestionTemplate,
    templates: &mut Vec<QuestionTemplate>,
) -> Result<(), RuleError> {
    if t.pattern.is_empty() {
        return fail(line_no, format!("template {} has no pattern", t.name));
    }
    if t.query.is_empty() {
        return fail(line_no, format!("template {} has no query", t.name));
    }
    if t.answer.is_empty() {
        return fail(line_no, format!("template {} has no answer", t.name));
    }
    templates.push(t);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const RULES: &str = "\
% subject handling
rule R2
  match v: pos=VERB
  match a: dep=nsubj head=v
  match t: dep=dobj head=v
  produce 0.9 cause($v, $a)
  produce 0.85 agent($v, $a)

rule R4
  match v: pos=VERB
  match s: dep=nsubj head=v
  no dep=dobj head=v
  produce 1.0 theme($v, $s)
";

    #[test]
    fn parses_slots_guards_and_productions() {
        let rules = parse_rules(RULES).unwrap();
        assert_eq!(rules.len(), 2);
        let r2 = &rules[0];
        assert_eq!(r2.name, "R2");
        assert_eq!(r2.slots.len(), 3);
        assert_eq!(r2.slots[1].dep.as_deref(), Some("nsubj"));
        assert_eq!(r2.slots[1].head, Some('v'));
        assert_eq!(r2.productions.len(), 2);
        assert_eq!(r2.productions[0].confidence, 0.9);
        assert_eq!(
            r2.productions[0].args,
            vec![
                ArgSpec { mode: ArgMode::Instance, slot: 'v' },
                ArgSpec { mode: ArgMode::Instance, slot: 'a' },
            ]
        );
        let r4 = &rules[1];
        assert_eq!(r4.guards.len(), 1);
        assert_eq!(r4.guards[0].dep.as_deref(), Some("dobj"));
        assert_eq!(r4.guards[0].head, Some('v'));
    }

    #[test]
    fn all_four_arg_modes_parse() {
        let rules = parse_rules(
            "rule R1\n  match v: pos=VERB\n  produce 1.0 mix(!v, $v, &v, ~v)\n",
        )
        .unwrap();
        let modes: Vec<ArgMode> = rules[0].productions[0].args.iter().map(|a| a.mode).collect();
        assert_eq!(
            modes,
            vec![ArgMode::Fresh, ArgMode::Instance, ArgMode::Concept, ArgMode::Phrase]
        );
    }

    #[test]
    fn unknown_slot_reference_is_an_error() {
        let err = parse_rules("rule R1\n  match v: pos=VERB\n  produce 1.0 isa(!x)\n")
            .unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.msg.contains("unknown slot `x`"));
    }

    #[test]
    fn head_must_name_an_earlier_slot() {
        let err = parse_rules("rule R1\n  match a: dep=nsubj head=v\n  produce 1.0 p(~a)\n")
            .unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.msg.contains("unknown slot `v`"));
    }

    #[test]
    fn rule_without_productions_is_an_error() {
        let err = parse_rules("rule R1\n  match v: pos=VERB\n").unwrap_err();
        assert!(err.msg.contains("no productions"));
    }

    #[test]
    fn confidence_outside_unit_interval_is_an_error() {
        let err =
            parse_rules("rule R1\n  match v: pos=VERB\n  produce 1.5 p(~v)\n").unwrap_err();
        assert!(err.msg.contains("outside [0, 1]"));
    }

    #[test]
    fn templates_parse_pattern_given_query_answer() {
        let text = "\
template QT1
  pattern what causes the $a to $v ?
  query isa(E, &v), theme(E, $a), cause(E, ?ans)
  answer ?ans

template QT2
  pattern what can decrease if the $a is constant ?
  given constant_concept(&a)
  query decreases(?ans)
  answer ?ans
";
        let ts = parse_templates(text).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[0].pattern.len(), 7);
        assert_eq!(ts[0].pattern[0], PatTok::Word("what".to_string()));
        assert_eq!(ts[0].pattern[3], PatTok::Slot('a'));
        assert_eq!(ts[0].answer, "ans");
        assert_eq!(ts[1].given, vec!["constant_concept(&a)".to_string()]);
    }

    #[test]
    fn template_missing_query_is_an_error() {
        let err = parse_templates("template QT1\n  pattern what ?\n  answer ?a\n").unwrap_err();
        assert!(err.msg.contains("no query"));
    }
}
