//! Proof-enumerating inference with noisy-or probability combination.
//!
//! A proof's probability is the product over the distinct uncertain events
//! it rests on: statements with probability below one (each counted once,
//! however often it is used), negation checks with factor `1 - P(goal)`,
//! and comparisons, which contribute factor zero when they do not hold.
//! Proofs of the same answer resting on the same event set are counted
//! once; the survivors combine as `1 - prod(1 - p_k)`.
//!
//! A query can end three ways: entailed (probability above zero), known
//! false (at least one proof, all with probability zero), or unknown (no
//! proof at all). A goal over a predicate the store has never seen simply
//! fails; it does not raise an error.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::builtins::eval_builtin;
use crate::store::KnowledgeStore;
use crate::term::{GoalExpr, Term};
use crate::unify::{apply, apply_atom, apply_goal, unify_atoms, Bindings, Renamer};

pub const DEFAULT_DEPTH_LIMIT: usize = 12;
pub const DEFAULT_MAX_PROOFS: usize = 64;

/// Hard ceiling on enumerated proof states per query, guarding against
/// blowups the depth limit alone does not catch.
const STATE_CAP: usize = 16384;

#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Maximum nesting of clause-body expansions along one proof path.
    pub depth_limit: usize,
    /// Maximum proofs kept per distinct answer binding.
    pub max_proofs: usize,
    /// Cap on returned answers after sorting; `None` keeps all.
    pub answer_limit: Option<usize>,
    /// Prunes a goal that repeats an ancestor goal verbatim.
    pub loop_check: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            depth_limit: DEFAULT_DEPTH_LIMIT,
            max_proofs: DEFAULT_MAX_PROOFS,
            answer_limit: None,
            loop_check: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineError {
    /// A comparison reached with an unbound operand.
    UnboundCompare(String),
    /// A comparison over ground operands that are not numbers.
    NonNumericCompare(String),
    /// A negated goal still holding variables.
    UnboundNegation(String),
    /// A goal recursing into itself across a negation boundary.
    Stratification(String),
    Builtin(String),
}

impl core::fmt::Display for EngineError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EngineError::UnboundCompare(g) => {
                write!(f, "comparison `{g}` has unbound operands")
            }
            EngineError::NonNumericCompare(g) => {
                write!(f, "comparison `{g}` needs numeric operands")
            }
            EngineError::UnboundNegation(g) => {
                write!(f, "negated goal `{g}` must be ground")
            }
            EngineError::Stratification(g) => {
                write!(f, "goal `{g}` recurses through negation")
            }
            EngineError::Builtin(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Entailed,
    KnownFalse,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Entailed => "entailed",
            Status::KnownFalse => "known_false",
            Status::Unknown => "unknown",
        }
    }
}

/// One step of a finished proof, pre-rendered for display.
#[derive(Debug, Clone, PartialEq)]
pub enum ProofNode {
    Fact { id: String, atom: String, prob: f64 },
    Clause { id: String, head: String, prob: f64, children: Vec<ProofNode> },
    Negation { goal: String, factor: f64 },
    Comparison { goal: String, holds: bool },
    Builtin { goal: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proof {
    pub prob: f64,
    /// Ids of every statement resolved against, negation subproofs aside.
    pub used: BTreeSet<String>,
    /// Sources of the used statements.
    pub sources: BTreeSet<String>,
    pub nodes: Vec<ProofNode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    /// Query variables in first-occurrence order with their values.
    pub bindings: Vec<(String, Term)>,
    pub prob: f64,
    pub status: Status,
    pub proofs: Vec<Proof>,
}

impl Answer {
    /// Union of statement ids across the answer's proofs.
    pub fn trace(&self) -> BTreeSet<String> {
        self.proofs.iter().flat_map(|p| p.used.iter().cloned()).collect()
    }

    pub fn sources(&self) -> BTreeSet<String> {
        self.proofs.iter().flat_map(|p| p.sources.iter().cloned()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub vars: Vec<String>,
    /// Sorted by probability descending, ties by binding text.
    pub answers: Vec<Answer>,
    /// True when the depth limit or a proof cap cut enumeration short.
    pub possibly_incomplete: bool,
}

impl QueryResult {
    /// Overall status: the best answer's status, or unknown without any.
    pub fn status(&self) -> Status {
        if self.answers.is_empty() {
            Status::Unknown
        } else if self.answers.iter().any(|a| a.status == Status::Entailed) {
            Status::Entailed
        } else {
            Status::KnownFalse
        }
    }

    /// Probability of a ground query: its single answer's, zero otherwise.
    pub fn prob(&self) -> f64 {
        self.answers.first().map(|a| a.prob).unwrap_or(0.0)
    }

    pub fn entailed(&self) -> impl Iterator<Item = &Answer> {
        self.answers.iter().filter(|a| a.status == Status::Entailed)
    }
}

/// An uncertain event a proof rests on; the dedup key for proofs is the
/// set of these. Certain steps (probability-one statements, negations of
/// unprovable goals, comparisons that hold) contribute no event, so two
/// routes differing only in certain steps count as one proof.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum ProbEvent {
    Stmt(String),
    /// Negated goal text with the factor's bit pattern.
    Neg(String, u64),
    FalseCmp(String),
}

#[derive(Debug, Clone, Default)]
struct ProofState {
    b: Bindings,
    used: BTreeSet<String>,
    events: BTreeSet<ProbEvent>,
    nodes: Vec<ProofNode>,
}

struct Ctx {
    renamer: Renamer,
    /// Ancestor goals on the current path with their negation depth.
    stack: Vec<(String, u32)>,
    neg_level: u32,
    incomplete: bool,
    states: usize,
}

pub struct Engine<'a> {
    store: &'a KnowledgeStore,
    config: EngineConfig,
}

impl<'a> Engine<'a> {
    pub fn new(store: &'a KnowledgeStore, config: EngineConfig) -> Self {
        Engine { store, config }
    }

    pub fn with_defaults(store: &'a KnowledgeStore) -> Self {
        Engine::new(store, EngineConfig::default())
    }

    /// Solves the goals left to right under shared bindings and aggregates
    /// proofs into per-binding answers.
    pub fn query(&self, goals: &[GoalExpr]) -> Result<QueryResult, EngineError> {
        let mut vars = Vec::new();
        for g in goals {
            g.collect_vars(&mut vars);
        }
        let mut ctx = Ctx {
            renamer: Renamer::new(),
            stack: Vec::new(),
            neg_level: 0,
            incomplete: false,
            states: 0,
        };
        let mut raw = Vec::new();
        self.solve_seq(goals, ProofState::default(), 0, &mut ctx, &mut raw)?;

        // Group proof states by their answer bindings, first seen first.
        let mut order: Vec<Vec<String>> = Vec::new();
        let mut groups: BTreeMap<Vec<String>, (Vec<(String, Term)>, Vec<ProofState>)> =
            BTreeMap::new();
        for st in raw {
            let bound: Vec<(String, Term)> = vars
                .iter()
                .map(|v| (v.clone(), apply(&Term::Variable(v.clone()), &st.b)))
                .collect();
            let key: Vec<String> = bound.iter().map(|(_, t)| t.to_string()).collect();
            let entry = groups.entry(key.clone()).or_insert_with(|| {
                order.push(key);
                (bound, Vec::new())
            });
            if entry.1.len() >= self.config.max_proofs {
                ctx.incomplete = true;
                continue;
            }
            entry.1.push(st);
        }

        let mut answers = Vec::new();
        for key in order {
            let (bound, states) = groups.remove(&key).unwrap();
            let mut seen: BTreeSet<BTreeSet<ProbEvent>> = BTreeSet::new();
            let mut proofs = Vec::new();
            for st in states {
                if !seen.insert(st.events.clone()) {
                    continue;
                }
                let prob = self.proof_prob(&st.events);
                let sources = st
                    .used
                    .iter()
                    .filter_map(|id| self.store.get(id).map(|s| s.source.clone()))
                    .collect();
                proofs.push(Proof { prob, used: st.used, sources, nodes: st.nodes });
            }
            let prob = noisy_or(proofs.iter().map(|p| p.prob));
            let status = if prob > 0.0 { Status::Entailed } else { Status::KnownFalse };
            answers.push(Answer { bindings: bound, prob, status, proofs });
        }
        answers.sort_by(|a, b| {
            b.prob
                .total_cmp(&a.prob)
                .then_with(|| binding_text(&a.bindings).cmp(&binding_text(&b.bindings)))
        });
        if let Some(limit) = self.config.answer_limit {
            answers.truncate(limit);
        }
        Ok(QueryResult { vars, answers, possibly_incomplete: ctx.incomplete })
    }

    fn proof_prob(&self, events: &BTreeSet<ProbEvent>) -> f64 {
        let mut p = 1.0;
        for e in events {
            p *= match e {
                ProbEvent::Stmt(id) => self.store.get(id).map(|s| s.prob).unwrap_or(1.0),
                ProbEvent::Neg(_, bits) => f64::from_bits(*bits),
                ProbEvent::FalseCmp(_) => 0.0,
            };
        }
        p
    }

    fn solve_seq(
        &self,
        goals: &[GoalExpr],
        state: ProofState,
        depth: usize,
        ctx: &mut Ctx,
        out: &mut Vec<ProofState>,
    ) -> Result<(), EngineError> {
        match goals.split_first() {
            None => {
                out.push(state);
                Ok(())
            }
            Some((first, rest)) => {
                let mut mid = Vec::new();
                self.solve(first, state, depth, ctx, &mut mid)?;
                for st in mid {
                    self.solve_seq(rest, st, depth, ctx, out)?;
                }
                Ok(())
            }
        }
    }

    fn solve(
        &self,
        goal: &GoalExpr,
        state: ProofState,
        depth: usize,
        ctx: &mut Ctx,
        out: &mut Vec<ProofState>,
    ) -> Result<(), EngineError> {
        if ctx.states >= STATE_CAP {
            ctx.incomplete = true;
            return Ok(());
        }
        match goal {
            GoalExpr::And(goals) => self.solve_seq(goals, state, depth, ctx, out),
            GoalExpr::Or(goals) => {
                for g in goals {
                    self.solve(g, state.clone(), depth, ctx, out)?;
                }
                Ok(())
            }
            GoalExpr::Not(inner) => self.eval_negation(inner, state, depth, ctx, out),
            GoalExpr::Compare(op, l, r) => {
                let lv = apply(l, &state.b);
                let rv = apply(r, &state.b);
                let text = format!("{lv} {} {rv}", op.as_str());
                match (&lv, &rv) {
                    (Term::Number(a), Term::Number(c)) => {
                        let holds = op.eval(*a, *c);
                        let mut st = state;
                        st.nodes.push(ProofNode::Comparison { goal: text.clone(), holds });
                        if !holds {
                            st.events.insert(ProbEvent::FalseCmp(text));
                        }
                        ctx.states += 1;
                        out.push(st);
                        Ok(())
                    }
                    _ if !lv.is_ground() || !rv.is_ground() => {
                        Err(EngineError::UnboundCompare(text))
                    }
                    _ => Err(EngineError::NonNumericCompare(text)),
                }
            }
            GoalExpr::Builtin(name, args) => {
                let rendered = apply_goal(goal, &state.b).to_string();
                for b2 in eval_builtin(name, args, &state.b)? {
                    let mut st = state.clone();
                    st.b = b2;
                    st.nodes.push(ProofNode::Builtin { goal: rendered.clone() });
                    ctx.states += 1;
                    out.push(st);
                }
                Ok(())
            }
            GoalExpr::Atom(atom) => {
                let rendered = apply_atom(atom, &state.b);
                let key = rendered.to_string();
                if self.config.loop_check {
                    if let Some((_, lvl)) = ctx.stack.iter().find(|(k, _)| *k == key) {
                        if *lvl != ctx.neg_level {
                            return Err(EngineError::Stratification(key));
                        }
                        return Ok(());
                    }
                }
                let candidates = self.store.lookup(&atom.pred, atom.args.len());
                if candidates.is_empty() {
                    return Ok(());
                }
                ctx.stack.push((key, ctx.neg_level));
                let result = (|| {
                    for stmt in candidates {
                        let mut map = BTreeMap::new();
                        let head = ctx.renamer.rename_atom(&stmt.head, &mut map);
                        let mut b2 = state.b.clone();
                        if !unify_atoms(&rendered, &head, &mut b2) {
                            continue;
                        }
                        let mut st = state.clone();
                        st.b = b2;
                        st.used.insert(stmt.id.clone());
                        if stmt.prob != 1.0 {
                            st.events.insert(ProbEvent::Stmt(stmt.id.clone()));
                        }
                        match &stmt.body {
                            None => {
                                st.nodes.push(ProofNode::Fact {
                                    id: stmt.id.clone(),
                                    atom: apply_atom(&head, &st.b).to_string(),
                                    prob: stmt.prob,
                                });
                                ctx.states += 1;
                                out.push(st);
                            }
                            Some(body) => {
                                if depth >= self.config.depth_limit {
                                    ctx.incomplete = true;
                                    continue;
                                }
                                let body = ctx.renamer.rename_goal(body, &mut map);
                                let parent_nodes = core::mem::take(&mut st.nodes);
                                let mut sub = Vec::new();
                                self.solve(&body, st, depth + 1, ctx, &mut sub)?;
                                for mut s in sub {
                                    let children =
                                        core::mem::replace(&mut s.nodes, parent_nodes.clone());
                                    s.nodes.push(ProofNode::Clause {
                                        id: stmt.id.clone(),
                                        head: apply_atom(&head, &s.b).to_string(),
                                        prob: stmt.prob,
                                        children,
                                    });
                                    out.push(s);
                                }
                            }
                        }
                    }
                    Ok(())
                })();
                ctx.stack.pop();
                result
            }
        }
    }

    /// Negation as a probability factor: succeeds exactly once with factor
    /// `1 - P(goal)`. An unprovable goal gives factor one; a certain goal
    /// gives factor zero, which completes the proof as known false rather
    /// than failing it.
    fn eval_negation(
        &self,
        inner: &GoalExpr,
        state: ProofState,
        depth: usize,
        ctx: &mut Ctx,
        out: &mut Vec<ProofState>,
    ) -> Result<(), EngineError> {
        let goal = apply_goal(inner, &state.b);
        let mut vars = Vec::new();
        goal.collect_vars(&mut vars);
        if !vars.is_empty() {
            return Err(EngineError::UnboundNegation(goal.to_string()));
        }
        let mut sub = Vec::new();
        ctx.neg_level += 1;
        let solved = self.solve(&goal, ProofState::default(), depth, ctx, &mut sub);
        ctx.neg_level -= 1;
        solved?;
        let mut seen: BTreeSet<BTreeSet<ProbEvent>> = BTreeSet::new();
        let mut probs = Vec::new();
        for st in sub {
            if seen.insert(st.events.clone()) {
                probs.push(self.proof_prob(&st.events));
            }
        }
        let factor = 1.0 - noisy_or(probs.into_iter());
        let text = goal.to_string();
        let mut st = state;
        st.nodes.push(ProofNode::Negation { goal: text.clone(), factor });
        if factor != 1.0 {
            st.events.insert(ProbEvent::Neg(text, factor.to_bits()));
        }
        ctx.states += 1;
        out.push(st);
        Ok(())
    }
}

fn binding_text(bindings: &[(String, Term)]) -> String {
    let parts: Vec<String> = bindings.iter().map(|(v, t)| format!("{v}={t}")).collect();
    parts.join(", ")
}

/// `1 - prod(1 - p_k)` over the given proof probabilities.
pub fn noisy_or(probs: impl Iterator<Item = f64>) -> f64 {
    let mut miss = 1.0;
    for p in probs {
        miss *= 1.0 - p;
    }
    1.0 - miss
}

/// Renders a probability with twelve significant digits, trailing zeros
/// trimmed, always in plain decimal notation.
pub fn format_prob(p: f64) -> String {
    if p <= 0.0 {
        return String::from("0");
    }
    if p >= 1.0 {
        return String::from("1");
    }
    let mut exp = 0i32;
    let mut x = p;
    while x < 1.0 {
        x *= 10.0;
        exp -= 1;
    }
    let decimals = (11 - exp) as usize;
    let mut s = format!("{p:.decimals$}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    if s == "1" || s.is_empty() {
        // Rounding carried all the way up.
        return String::from("1");
    }
    s
}

/// Indented text rendering of a proof tree.
pub fn format_proof(proof: &Proof) -> String {
    let mut s = format!("proof p={}\n", format_prob(proof.prob));
    for node in &proof.nodes {
        format_node(node, 1, &mut s);
    }
    s
}

fn format_node(node: &ProofNode, indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
    match node {
        ProofNode::Fact { id, atom, prob } => {
            out.push_str(&format!("{} {atom} [{id}]\n", format_prob(*prob)));
        }
        ProofNode::Clause { id, head, prob, children } => {
            out.push_str(&format!("{} {head} [{id}]\n", format_prob(*prob)));
            for c in children {
                format_node(c, indent + 1, out);
            }
        }
        ProofNode::Negation { goal, factor } => {
            out.push_str(&format!("not {goal} [factor {}]\n", format_prob(*factor)));
        }
        ProofNode::Comparison { goal, holds } => {
            out.push_str(&format!("{goal} [{}]\n", if *holds { "holds" } else { "fails" }));
        }
        ProofNode::Builtin { goal } => {
            out.push_str(&format!("{goal} [builtin]\n"));
        }
    }
}
