//! Mapping dependency-parsed text onto knowledge statements.
//!
//! A passage arrives as one dependency parse per sentence. Mapping rules
//! walk the parses in file order; every match of a rule folds into every
//! interpretation currently on the beam. Where a rule offers several
//! productions, or a word grounds to several concepts, the interpretation
//! forks: the first surviving successor keeps its parent's id, the rest get
//! fresh ids and take over their accumulated facts under the new id. After
//! each applied match the beam is pruned to the top `k` by score, oldest
//! lineage first on ties.
//!
//! Scores multiply production confidences. A selectional violation either
//! discards the successor (strict mode) or multiplies the score by a small
//! penalty (lenient mode). The facts themselves always carry probability
//! one; uncertainty about a reading lives in the score alone.
//!
//! Instances are named `<concept>_ins<n>` per interpretation and declared
//! with an `isa` fact on minting. Verbs mint a fresh instance per token.
//! Nouns follow the determiner: an indefinite article mints, anything else
//! reuses the newest instance of the same concept when one exists, even
//! across sentences.

pub mod qa;
pub mod rules;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::store::KnowledgeStore;
use crate::term::{Atom, Statement, Term};
use rules::{ArgMode, MappingRule, NegConstraint, Production, SlotConstraint};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepToken {
    pub index: usize,
    pub word: String,
    pub lemma: String,
    pub pos: String,
    pub dep: String,
    /// Index of the head token, `-1` for the root.
    pub head: isize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemParseOptions {
    pub beam: usize,
    pub strict: bool,
    pub wsd_cap: usize,
    pub lenient_penalty: f64,
}

impl Default for SemParseOptions {
    fn default() -> Self {
        SemParseOptions { beam: 3, strict: true, wsd_cap: 3, lenient_penalty: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemParseError {
    BadToken { sentence: usize, index: usize, msg: String },
}

impl fmt::Display for SemParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemParseError::BadToken { sentence, index, msg } => {
                write!(f, "sentence {sentence}, token {index}: {msg}")
            }
        }
    }
}

/// One reading of a passage: facts plus the bookkeeping to extend it.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpretation {
    pub id: String,
    pub score: f64,
    pub facts: Vec<Statement>,
    /// Minted instance name to the concept it instantiates.
    pub instance_concept: BTreeMap<String, String>,
    /// Names of the rules that contributed to this reading.
    pub fired: BTreeSet<String>,
    seq: u64,
    token_instance: BTreeMap<(usize, usize), String>,
    concept_instances: BTreeMap<String, Vec<String>>,
    concept_counts: BTreeMap<String, u64>,
}

impl Interpretation {
    fn new(id: String, seq: u64) -> Self {
        Interpretation {
            id,
            score: 1.0,
            facts: Vec::new(),
            instance_concept: BTreeMap::new(),
            fired: BTreeSet::new(),
            seq,
            token_instance: BTreeMap::new(),
            concept_instances: BTreeMap::new(),
            concept_counts: BTreeMap::new(),
        }
    }

    /// Newest minted instance of a concept, if any.
    pub fn latest_instance_of(&self, concept: &str) -> Option<&str> {
        self.concept_instances
            .get(concept)
            .and_then(|v| v.last())
            .map(String::as_str)
    }

    fn push_fact(&mut self, atom: Atom) {
        if self.facts.iter().any(|s| s.head == atom) {
            return;
        }
        self.facts
            .push(Statement::fact(atom, 1.0).with_source(self.id.clone()));
    }

    fn rename(&mut self, id: String) {
        for fact in &mut self.facts {
            fact.source = id.clone();
        }
        self.id = id;
    }

    fn mint(&mut self, sent: usize, index: usize, concept: &str) -> String {
        let n = self.concept_counts.entry(concept.to_string()).or_insert(0);
        *n += 1;
        let name = format!("{concept}_ins{n}");
        self.token_instance.insert((sent, index), name.clone());
        self.concept_instances
            .entry(concept.to_string())
            .or_default()
            .push(name.clone());
        self.instance_concept.insert(name.clone(), concept.to_string());
        self.push_fact(Atom::new(
            "isa",
            alloc::vec![Term::Symbol(name.clone()), Term::Symbol(concept.to_string())],
        ));
        name
    }

    fn instance_for(
        &mut self,
        sent: usize,
        tokens: &[DepToken],
        index: usize,
        concept: &str,
    ) -> String {
        if let Some(name) = self.token_instance.get(&(sent, index)) {
            return name.clone();
        }
        let token = &tokens[index];
        let indefinite = token.pos == "VERB"
            || matches!(det_lemma(tokens, index), Some("a" | "an" | "another"));
        if !indefinite {
            let existing = self.concept_instances.get(concept).and_then(|v| v.last()).cloned();
            if let Some(name) = existing {
                self.token_instance.insert((sent, index), name.clone());
                return name;
            }
        }
        self.mint(sent, index, concept)
    }
}

fn det_lemma(tokens: &[DepToken], index: usize) -> Option<&str> {
    tokens
        .iter()
        .find(|t| t.dep == "det" && t.head == index as isize)
        .map(|t| t.lemma.as_str())
}

/// Parses one passage into scored interpretations, best first.
pub fn parse_passage(
    store: &KnowledgeStore,
    rules: &[MappingRule],
    sentences: &[Vec<DepToken>],
    opts: &SemParseOptions,
) -> Result<Vec<Interpretation>, SemParseError> {
    for (si, sentence) in sentences.iter().enumerate() {
        for (ti, token) in sentence.iter().enumerate() {
            if token.index != ti {
                return Err(SemParseError::BadToken {
                    sentence: si,
                    index: ti,
                    msg: format!("index field says {}", token.index),
                });
            }
            if token.head >= sentence.len() as isize || token.head < -1 {
                return Err(SemParseError::BadToken {
                    sentence: si,
                    index: ti,
                    msg: format!("head {} out of range", token.head),
                });
            }
            if token.head == ti as isize {
                return Err(SemParseError::BadToken {
                    sentence: si,
                    index: ti,
                    msg: String::from("token is its own head"),
                });
            }
        }
    }
    let mut next_id: u64 = 1;
    let mut next_seq: u64 = 0;
    let mut beam = alloc::vec![Interpretation::new(String::from("interp_1"), 0)];
    for (si, sentence) in sentences.iter().enumerate() {
        for rule in rules {
            for m in find_matches(rule, sentence) {
                let mut grown: Vec<Interpretation> = Vec::new();
                for interp in &beam {
                    apply_match(
                        store, opts, sentence, si, rule, &m, interp,
                        &mut next_id, &mut next_seq, &mut grown,
                    );
                }
                beam = grown;
                beam.sort_by(|a, b| {
                    b.score.total_cmp(&a.score).then_with(|| a.seq.cmp(&b.seq))
                });
                beam.truncate(opts.beam);
                if beam.is_empty() {
                    return Ok(beam);
                }
            }
        }
    }
    Ok(beam)
}

/// Enumerates slot assignments for a rule over one sentence.
fn find_matches(rule: &MappingRule, tokens: &[DepToken]) -> Vec<BTreeMap<char, usize>> {
    let mut out = Vec::new();
    let mut partial = BTreeMap::new();
    assign(&rule.slots, 0, tokens, &mut partial, &mut out);
    out.retain(|m| {
        rule.guards
            .iter()
            .all(|g| !tokens.iter().any(|t| guard_hits(g, t, m)))
    });
    out
}

fn assign(
    slots: &[SlotConstraint],
    at: usize,
    tokens: &[DepToken],
    partial: &mut BTreeMap<char, usize>,
    out: &mut Vec<BTreeMap<char, usize>>,
) {
    let Some(slot) = slots.get(at) else {
        out.push(partial.clone());
        return;
    };
    for token in tokens {
        if partial.values().any(|&i| i == token.index) {
            continue;
        }
        if slot_fits(slot, token, partial) {
            partial.insert(slot.slot, token.index);
            assign(slots, at + 1, tokens, partial, out);
            partial.remove(&slot.slot);
        }
    }
}

fn slot_fits(c: &SlotConstraint, t: &DepToken, bound: &BTreeMap<char, usize>) -> bool {
    c.dep.as_ref().is_none_or(|d| &t.dep == d)
        && c.pos.as_ref().is_none_or(|p| &t.pos == p)
        && c.lemma.as_ref().is_none_or(|l| &t.lemma == l)
        && c.head.is_none_or(|h| t.head == bound[&h] as isize)
}

fn guard_hits(g: &NegConstraint, t: &DepToken, bound: &BTreeMap<char, usize>) -> bool {
    g.dep.as_ref().is_none_or(|d| &t.dep == d)
        && g.pos.as_ref().is_none_or(|p| &t.pos == p)
        && g.lemma.as_ref().is_none_or(|l| &t.lemma == l)
        && g.head.is_none_or(|h| t.head == bound[&h] as isize)
}

/// Concepts a lemma can mean, in knowledge order.
fn ground_phrase(store: &KnowledgeStore, lemma: &str, cap: usize) -> Vec<String> {
    let mut out = Vec::new();
    for stmt in store.lookup("has_name", 2) {
        if !stmt.is_fact() || stmt.prob == 0.0 {
            continue;
        }
        if let (Term::Symbol(concept), Term::Phrase(name)) =
            (&stmt.head.args[0], &stmt.head.args[1])
        {
            if name == lemma && !out.contains(concept) {
                out.push(concept.clone());
                if out.len() == cap {
                    break;
                }
            }
        }
    }
    out
}

fn sanitize(lemma: &str) -> String {
    let mut out = String::new();
    for c in lemma.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else {
            out.push('_');
        }
    }
    if !out.starts_with(|c: char| c.is_ascii_alphabetic()) {
        out.insert(0, 'x');
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn apply_match(
    store: &KnowledgeStore,
    opts: &SemParseOptions,
    tokens: &[DepToken],
    sent: usize,
    rule: &MappingRule,
    m: &BTreeMap<char, usize>,
    parent: &Interpretation,
    next_id: &mut u64,
    next_seq: &mut u64,
    out: &mut Vec<Interpretation>,
) {
    let mut groundings: BTreeMap<char, Vec<Option<String>>> = BTreeMap::new();
    for prod in &rule.productions {
        for arg in &prod.args {
            if arg.mode == ArgMode::Phrase || groundings.contains_key(&arg.slot) {
                continue;
            }
            let lemma = &tokens[m[&arg.slot]].lemma;
            let found = ground_phrase(store, lemma, opts.wsd_cap);
            let choices = if found.is_empty() {
                alloc::vec![None]
            } else {
                found.into_iter().map(Some).collect()
            };
            groundings.insert(arg.slot, choices);
        }
    }
    let mut parent_id_taken = false;
    for prod in &rule.productions {
        let mut used: Vec<char> = prod
            .args
            .iter()
            .filter(|a| a.mode != ArgMode::Phrase)
            .map(|a| a.slot)
            .collect();
        used.sort_unstable();
        used.dedup();
        for combo in combos(&used.iter().map(|s| groundings[s].len()).collect::<Vec<_>>()) {
            let chosen: BTreeMap<char, &Option<String>> = used
                .iter()
                .zip(&combo)
                .map(|(&s, &i)| (s, &groundings[&s][i]))
                .collect();
            if let Some(succ) =
                build_successor(store, opts, tokens, sent, m, prod, &chosen, parent)
            {
                let mut succ = succ;
                succ.fired.insert(rule.name.clone());
                if parent_id_taken {
                    *next_id += 1;
                    succ.rename(format!("interp_{next_id}"));
                    *next_seq += 1;
                    succ.seq = *next_seq;
                } else {
                    parent_id_taken = true;
                }
                out.push(succ);
            }
        }
    }
}

fn build_successor(
    store: &KnowledgeStore,
    opts: &SemParseOptions,
    tokens: &[DepToken],
    sent: usize,
    m: &BTreeMap<char, usize>,
    prod: &Production,
    chosen: &BTreeMap<char, &Option<String>>,
    parent: &Interpretation,
) -> Option<Interpretation> {
    let mut succ = parent.clone();
    let mut args = Vec::new();
    for arg in &prod.args {
        let index = m[&arg.slot];
        let term = match arg.mode {
            ArgMode::Phrase => Term::Phrase(tokens[index].word.clone()),
            ArgMode::Concept => match chosen[&arg.slot] {
                Some(concept) => Term::Symbol(concept.clone()),
                None => Term::Phrase(tokens[index].lemma.clone()),
            },
            ArgMode::Fresh | ArgMode::Instance => {
                let concept = match chosen[&arg.slot] {
                    Some(concept) => concept.clone(),
                    None => sanitize(&tokens[index].lemma),
                };
                let name = if arg.mode == ArgMode::Fresh {
                    succ.mint(sent, index, &concept)
                } else {
                    succ.instance_for(sent, tokens, index, &concept)
                };
                Term::Symbol(name)
            }
        };
        args.push(term);
    }
    let atom = Atom::new(prod.pred.clone(), args);
    let violations = selectional_violations(store, &succ, &atom);
    if violations > 0 && opts.strict {
        return None;
    }
    succ.score *= prod.confidence;
    for _ in 0..violations {
        succ.score *= opts.lenient_penalty;
    }
    succ.push_fact(atom);
    Some(succ)
}

fn combos(lens: &[usize]) -> Vec<Vec<usize>> {
    let mut out = alloc::vec![Vec::new()];
    for &len in lens {
        let mut next = Vec::new();
        for prefix in &out {
            for i in 0..len {
                let mut combo = prefix.clone();
                combo.push(i);
                next.push(combo);
            }
        }
        out = next;
    }
    out
}

/// Counts restriction misses for a role fact, zero when unrestricted.
fn selectional_violations(
    store: &KnowledgeStore,
    interp: &Interpretation,
    atom: &Atom,
) -> usize {
    if atom.args.len() != 2 {
        return 0;
    }
    let Term::Symbol(event) = &atom.args[0] else {
        return 0;
    };
    let event_concept = interp
        .instance_concept
        .get(event)
        .cloned()
        .unwrap_or_else(|| event.clone());
    let types = store.selectional_for(&atom.pred, &event_concept);
    if types.is_empty() {
        return 0;
    }
    if types.iter().any(|ty| has_type(store, interp, &atom.args[1], ty)) {
        0
    } else {
        1
    }
}

/// Walks `isa` links and ontology parents looking for the type name.
pub fn has_type(store: &KnowledgeStore, interp: &Interpretation, term: &Term, ty: &str) -> bool {
    let Term::Symbol(start) = term else {
        return false;
    };
    let mut frontier = alloc::vec![start.clone()];
    let mut seen: BTreeSet<String> = frontier.iter().cloned().collect();
    let mut visits = 0;
    while let Some(current) = frontier.pop() {
        visits += 1;
        if visits > 64 {
            return false;
        }
        if current.eq_ignore_ascii_case(ty) {
            return true;
        }
        let mut push = |name: &str, frontier: &mut Vec<String>| {
            if seen.insert(name.to_string()) {
                frontier.push(name.to_string());
            }
        };
        for fact in &interp.facts {
            if fact.head.pred == "isa" && fact.head.args.len() == 2 {
                if let (Term::Symbol(child), Term::Symbol(parent)) =
                    (&fact.head.args[0], &fact.head.args[1])
                {
                    if *child == current {
                        push(parent, &mut frontier);
                    }
                }
            }
        }
        for stmt in store.lookup("isa", 2) {
            if !stmt.is_fact() || stmt.prob == 0.0 {
                continue;
            }
            if let (Term::Symbol(child), Term::Symbol(parent)) =
                (&stmt.head.args[0], &stmt.head.args[1])
            {
                if *child == current {
                    push(parent, &mut frontier);
                }
            }
        }
        if let Some(node) = store.ontology().and_then(|o| o.get_ci(&current)) {
            for parent in node.parents.clone() {
                push(&parent, &mut frontier);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::rules::parse_rules;
    use super::*;
    use crate::parse::{parse_program, Directive};
    use crate::store::Layer;
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
isa(increase, event).
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

rule R4
  match v: pos=VERB
  match s: dep=nsubj head=v
  no dep=dobj head=v
  produce 1.0 theme($v, $s)

rule R5
  match v: pos=VERB
  match p: dep=prep head=v lemma=with
  match n: dep=pobj head=p
  produce 0.7 cause($v, $n)
  produce 0.7 co_theme($v, $n)
";

    fn walkthrough_sentences() -> Vec<Vec<DepToken>> {
        vec![
            vec![
                tok(0, "An", "an", "DET", "det", 1),
                tok(1, "obstruction", "obstruction", "NOUN", "nsubj", 2),
                tok(2, "increases", "increase", "VERB", "ROOT", -1),
                tok(3, "the", "the", "DET", "det", 4),
                tok(4, "pressure", "pressure", "NOUN", "dobj", 2),
                tok(5, ".", ".", "PUNCT", "punct", 2),
            ],
            vec![
                tok(0, "The", "the", "DET", "det", 1),
                tok(1, "pressure", "pressure", "NOUN", "nsubj", 2),
                tok(2, "increases", "increase", "VERB", "ROOT", -1),
                tok(3, "with", "with", "ADP", "prep", 2),
                tok(4, "the", "the", "DET", "det", 5),
                tok(5, "temperature", "temperature", "NOUN", "pobj", 3),
                tok(6, ".", ".", "PUNCT", "punct", 2),
            ],
        ]
    }

    fn fact_strings(interp: &Interpretation) -> Vec<String> {
        interp.facts.iter().map(|f| f.head.to_string()).collect()
    }

    #[test]
    fn strict_walkthrough_keeps_two_readings() {
        let store = demo_store();
        let rules = parse_rules(DEMO_RULES).unwrap();
        let opts = SemParseOptions::default();
        let interps =
            parse_passage(&store, &rules, &walkthrough_sentences(), &opts).unwrap();
        assert_eq!(interps.len(), 2);
        assert_eq!(interps[0].id, "interp_1");
        assert_eq!(interps[1].id, "interp_2");
        assert!((interps[0].score - 0.63).abs() < 1e-9);
        assert!((interps[1].score - 0.63).abs() < 1e-9);
        let facts = fact_strings(&interps[0]);
        assert!(facts.contains(&"cause(increase_ins1, obstruction_ins1)".to_string()));
        assert!(facts.contains(&"theme(increase_ins1, pressure_ins1)".to_string()));
        assert!(facts.contains(&"theme(increase_ins2, pressure_ins1)".to_string()));
        assert!(facts.contains(&"cause(increase_ins2, temperature_ins1)".to_string()));
        assert!(!facts.iter().any(|f| f.starts_with("agent(")));
        let other = fact_strings(&interps[1]);
        assert!(other.contains(&"co_theme(increase_ins2, temperature_ins1)".to_string()));
        assert!(interps[0].facts.iter().all(|f| f.source == "interp_1"));
        assert!(interps[1].facts.iter().all(|f| f.source == "interp_2"));
    }

    #[test]
    fn lenient_walkthrough_keeps_penalized_reading() {
        let store = demo_store();
        let rules = parse_rules(DEMO_RULES).unwrap();
        let opts = SemParseOptions { strict: false, ..SemParseOptions::default() };
        let interps =
            parse_passage(&store, &rules, &walkthrough_sentences(), &opts).unwrap();
        assert_eq!(interps.len(), 3);
        assert!((interps[0].score - 0.63).abs() < 1e-9);
        assert!((interps[1].score - 0.63).abs() < 1e-9);
        assert!((interps[2].score - 0.0595).abs() < 1e-9);
        let penalized = fact_strings(&interps[2]);
        assert!(penalized.contains(&"agent(increase_ins1, obstruction_ins1)".to_string()));
    }

    #[test]
    fn determiners_steer_instance_reuse() {
        let mut store = KnowledgeStore::new();
        for stmt in parse_program("has_name(dog, \"dog\").\nhas_name(bark, \"bark\").")
            .unwrap()
            .statements
        {
            store.add_statement(stmt, Layer::Base).unwrap();
        }
        let rules = parse_rules(
            "rule R1\n  match v: pos=VERB\n  produce 1.0 isa(!v, &v)\n\
             rule R4\n  match v: pos=VERB\n  match s: dep=nsubj head=v\n  no dep=dobj head=v\n  produce 1.0 theme($v, $s)\n",
        )
        .unwrap();
        let again = vec![
            vec![
                tok(0, "A", "a", "DET", "det", 1),
                tok(1, "dog", "dog", "NOUN", "nsubj", 2),
                tok(2, "barks", "bark", "VERB", "ROOT", -1),
            ],
            vec![
                tok(0, "The", "the", "DET", "det", 1),
                tok(1, "dog", "dog", "NOUN", "nsubj", 2),
                tok(2, "barks", "bark", "VERB", "ROOT", -1),
            ],
            vec![
                tok(0, "Another", "another", "DET", "det", 1),
                tok(1, "dog", "dog", "NOUN", "nsubj", 2),
                tok(2, "barks", "bark", "VERB", "ROOT", -1),
            ],
        ];
        let interps =
            parse_passage(&store, &rules, &again, &SemParseOptions::default()).unwrap();
        assert_eq!(interps.len(), 1);
        let facts = fact_strings(&interps[0]);
        assert!(facts.contains(&"theme(bark_ins1, dog_ins1)".to_string()));
        assert!(facts.contains(&"theme(bark_ins2, dog_ins1)".to_string()));
        assert!(facts.contains(&"theme(bark_ins3, dog_ins2)".to_string()));
    }

    #[test]
    fn ambiguous_words_fork_per_sense() {
        let mut store = KnowledgeStore::new();
        let text = "\
has_name(bowl_dish, \"bowl\").
has_name(bowl_action, \"bowl\").
has_name(tip, \"tip\").
";
        for stmt in parse_program(text).unwrap().statements {
            store.add_statement(stmt, Layer::Base).unwrap();
        }
        let rules = parse_rules(
            "rule R4\n  match v: pos=VERB\n  match s: dep=nsubj head=v\n  produce 1.0 theme(!v, &s)\n",
        )
        .unwrap();
        let sentence = vec![vec![
            tok(0, "The", "the", "DET", "det", 1),
            tok(1, "bowl", "bowl", "NOUN", "nsubj", 2),
            tok(2, "tips", "tip", "VERB", "ROOT", -1),
        ]];
        let interps =
            parse_passage(&store, &rules, &sentence, &SemParseOptions::default()).unwrap();
        assert_eq!(interps.len(), 2);
        assert!(fact_strings(&interps[0]).contains(&"theme(tip_ins1, bowl_dish)".to_string()));
        assert!(fact_strings(&interps[1]).contains(&"theme(tip_ins1, bowl_action)".to_string()));
        assert_eq!(interps[1].id, "interp_2");
    }

    #[test]
    fn beam_width_caps_the_fork_count() {
        let store = demo_store();
        let rules = parse_rules(DEMO_RULES).unwrap();
        let opts = SemParseOptions { beam: 1, strict: false, ..SemParseOptions::default() };
        let interps =
            parse_passage(&store, &rules, &walkthrough_sentences(), &opts).unwrap();
        assert_eq!(interps.len(), 1);
        assert_eq!(interps[0].id, "interp_1");
        assert!((interps[0].score - 0.63).abs() < 1e-9);
    }

    #[test]
    fn unknown_words_fall_back_to_phrases() {
        let store = KnowledgeStore::new();
        let rules = parse_rules(
            "rule R1\n  match v: pos=VERB\n  produce 1.0 isa(!v, &v)\n",
        )
        .unwrap();
        let sentence = vec![vec![tok(0, "frobnicates", "frobnicate", "VERB", "ROOT", -1)]];
        let interps =
            parse_passage(&store, &rules, &sentence, &SemParseOptions::default()).unwrap();
        assert_eq!(interps.len(), 1);
        let facts = fact_strings(&interps[0]);
        assert!(facts.contains(&"isa(frobnicate_ins1, frobnicate)".to_string()));
        assert!(facts.contains(&"isa(frobnicate_ins1, \"frobnicate\")".to_string()));
    }

    #[test]
    fn strict_mode_can_empty_the_beam() {
        let mut store = KnowledgeStore::new();
        for stmt in parse_program("has_name(sing, \"sing\").\nhas_name(rock, \"rock\").")
            .unwrap()
            .statements
        {
            store.add_statement(stmt, Layer::Base).unwrap();
        }
        store.add_selectional("agent", "sing", "sentient");
        let rules = parse_rules(
            "rule R\n  match v: pos=VERB\n  match s: dep=nsubj head=v\n  produce 1.0 agent($v, $s)\n",
        )
        .unwrap();
        let sentence = vec![vec![
            tok(0, "The", "the", "DET", "det", 1),
            tok(1, "rock", "rock", "NOUN", "nsubj", 2),
            tok(2, "sings", "sing", "VERB", "ROOT", -1),
        ]];
        let strict =
            parse_passage(&store, &rules, &sentence, &SemParseOptions::default()).unwrap();
        assert!(strict.is_empty());
        let lenient = parse_passage(
            &store,
            &rules,
            &sentence,
            &SemParseOptions { strict: false, ..SemParseOptions::default() },
        )
        .unwrap();
        assert_eq!(lenient.len(), 1);
        assert!((lenient[0].score - 0.1).abs() < 1e-9);
    }

    #[test]
    fn bad_head_index_is_reported() {
        let store = KnowledgeStore::new();
        let sentence = vec![vec![tok(0, "a", "a", "DET", "det", 9)]];
        let err = parse_passage(&store, &[], &sentence, &SemParseOptions::default())
            .unwrap_err();
        assert_eq!(
            err,
            SemParseError::BadToken {
                sentence: 0,
                index: 0,
                msg: "head 9 out of range".to_string()
            }
        );
    }
}
