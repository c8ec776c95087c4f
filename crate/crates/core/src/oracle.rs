//! Exact probability by possible-world enumeration.
//!
//! Every statement with probability strictly between zero and one doubles
//! the world count: in each world it is either present or absent. The
//! query probability is the total weight of worlds whose crisp program
//! derives the query. Derivation is checked by a bottom-up fixpoint with
//! its own one-way matcher, deliberately sharing no code with the engine's
//! resolution, so the two can check each other.
//!
//! Negation and list builtins are out of scope here; programs using them
//! are rejected rather than approximated.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::store::KnowledgeStore;
use crate::term::{Atom, CompareOp, GoalExpr, Statement, Term};

pub const MAX_UNCERTAIN: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    TooManyWorlds(usize),
    Unsupported(String),
}

impl core::fmt::Display for OracleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OracleError::TooManyWorlds(n) => {
                write!(f, "{n} uncertain statements exceed the {MAX_UNCERTAIN}-world cap")
            }
            OracleError::Unsupported(what) => write!(f, "oracle cannot evaluate {what}"),
        }
    }
}

enum Leaf<'a> {
    At(&'a Atom),
    Cmp(CompareOp, &'a Term, &'a Term),
}

/// Exact query probability over all worlds of the store's statements.
pub fn brute_force_prob(
    store: &KnowledgeStore,
    goals: &[GoalExpr],
) -> Result<f64, OracleError> {
    let statements: Vec<&Statement> = store.iter().collect();
    let uncertain: Vec<usize> = statements
        .iter()
        .enumerate()
        .filter(|(_, s)| s.prob > 0.0 && s.prob < 1.0)
        .map(|(i, _)| i)
        .collect();
    if uncertain.len() > MAX_UNCERTAIN {
        return Err(OracleError::TooManyWorlds(uncertain.len()));
    }
    // Reject unsupported constructs up front, not world by world.
    let query_conjunct = flatten_conjunct(goals)?;
    let mut rules: Vec<(usize, Vec<Vec<Leaf>>)> = Vec::new();
    for (i, s) in statements.iter().enumerate() {
        if let Some(body) = &s.body {
            rules.push((i, dnf(body)?));
        }
    }

    let mut total = 0.0;
    for mask in 0u64..(1u64 << uncertain.len()) {
        let mut weight = 1.0;
        let mut active: BTreeSet<usize> = statements
            .iter()
            .enumerate()
            .filter(|(_, s)| s.prob == 1.0)
            .map(|(i, _)| i)
            .collect();
        for (bit, &i) in uncertain.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                weight *= statements[i].prob;
                active.insert(i);
            } else {
                weight *= 1.0 - statements[i].prob;
            }
        }
        if weight == 0.0 {
            continue;
        }
        let db = fixpoint(&statements, &rules, &active);
        if satisfiable(&query_conjunct, &db, &BTreeMap::new()) {
            total += weight;
        }
    }
    Ok(total)
}

fn flatten_conjunct<'a>(goals: &'a [GoalExpr]) -> Result<Vec<Leaf<'a>>, OracleError> {
    let mut out = Vec::new();
    for g in goals {
        match g {
            GoalExpr::Atom(a) => out.push(Leaf::At(a)),
            GoalExpr::Compare(op, l, r) => out.push(Leaf::Cmp(*op, l, r)),
            GoalExpr::And(gs) => out.extend(flatten_conjunct(gs)?),
            GoalExpr::Or(_) => return Err(OracleError::Unsupported("disjunctive queries".to_string())),
            GoalExpr::Not(_) => return Err(OracleError::Unsupported("negation".to_string())),
            GoalExpr::Builtin(n, _) => {
                return Err(OracleError::Unsupported(alloc::format!("builtin `{n}`")))
            }
        }
    }
    Ok(out)
}

/// Disjunctive normal form of a clause body, comparisons last in each
/// conjunct so their operands are bound by the time they run.
fn dnf(goal: &GoalExpr) -> Result<Vec<Vec<Leaf<'_>>>, OracleError> {
    match goal {
        GoalExpr::Atom(a) => Ok(alloc::vec![alloc::vec![Leaf::At(a)]]),
        GoalExpr::Compare(op, l, r) => Ok(alloc::vec![alloc::vec![Leaf::Cmp(*op, l, r)]]),
        GoalExpr::Or(gs) => {
            let mut out = Vec::new();
            for g in gs {
                out.extend(dnf(g)?);
            }
            Ok(out)
        }
        GoalExpr::And(gs) => {
            let mut acc: Vec<Vec<Leaf>> = alloc::vec![Vec::new()];
            for g in gs {
                let parts = dnf(g)?;
                let mut next = Vec::new();
                for conj in &acc {
                    for part in &parts {
                        let mut merged: Vec<Leaf> = Vec::new();
                        merged.extend(conj.iter().map(copy_leaf));
                        merged.extend(part.iter().map(copy_leaf));
                        next.push(merged);
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
        GoalExpr::Not(_) => Err(OracleError::Unsupported("negation".to_string())),
        GoalExpr::Builtin(n, _) => {
            Err(OracleError::Unsupported(alloc::format!("builtin `{n}`")))
        }
    }
}

fn copy_leaf<'a>(l: &Leaf<'a>) -> Leaf<'a> {
    match l {
        Leaf::At(a) => Leaf::At(a),
        Leaf::Cmp(op, x, y) => Leaf::Cmp(*op, x, y),
    }
}

type Subst = BTreeMap<String, Term>;

fn walk(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Variable(v) => s.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Compound(f, args) => {
            Term::Compound(f.clone(), args.iter().map(|a| walk(a, s)).collect())
        }
        Term::List(items, tail) => {
            let mut out: Vec<Term> = items.iter().map(|i| walk(i, s)).collect();
            match tail.as_ref().and_then(|v| s.get(v)) {
                Some(Term::List(more, t2)) => {
                    out.extend(more.iter().cloned());
                    Term::List(out, t2.clone())
                }
                Some(_) | None => Term::List(out, tail.clone()),
            }
        }
        _ => t.clone(),
    }
}

/// One-way match of a pattern against a ground term.
fn match_term(pat: &Term, ground: &Term, s: &mut Subst) -> bool {
    match (pat, ground) {
        (Term::Variable(v), g) => match s.get(v) {
            Some(bound) => &walk(&bound.clone(), s) == g,
            None => {
                s.insert(v.clone(), g.clone());
                true
            }
        },
        (Term::Symbol(a), Term::Symbol(b)) => a == b,
        (Term::Phrase(a), Term::Phrase(b)) => a == b,
        (Term::Number(a), Term::Number(b)) => a == b,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, s))
        }
        (Term::List(xs, None), Term::List(ys, None)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, s))
        }
        (Term::List(xs, Some(tail)), Term::List(ys, None)) => {
            if ys.len() < xs.len() {
                return false;
            }
            if !xs.iter().zip(ys).all(|(x, y)| match_term(x, y, s)) {
                return false;
            }
            match_term(
                &Term::Variable(tail.clone()),
                &Term::List(ys[xs.len()..].to_vec(), None),
                s,
            )
        }
        _ => false,
    }
}

fn match_atom(pat: &Atom, ground: &Atom, s: &mut Subst) -> bool {
    pat.pred == ground.pred
        && pat.args.len() == ground.args.len()
        && pat.args.iter().zip(&ground.args).all(|(x, y)| match_term(x, y, s))
}

/// All substitutions satisfying the conjunct against the database.
fn satisfiable(conjunct: &[Leaf], db: &[Atom], s: &Subst) -> bool {
    // Atoms first, then comparisons over the resulting bindings.
    let (atoms, cmps): (Vec<&Leaf>, Vec<&Leaf>) =
        conjunct.iter().partition(|l| matches!(l, Leaf::At(_)));
    solve_atoms(&atoms, db, s, &|s| {
        cmps.iter().all(|l| {
            let Leaf::Cmp(op, x, y) = l else { unreachable!() };
            match (walk(x, s), walk(y, s)) {
                (Term::Number(a), Term::Number(b)) => op.eval(a, b),
                _ => false,
            }
        })
    })
}

fn solve_atoms(atoms: &[&Leaf], db: &[Atom], s: &Subst, done: &dyn Fn(&Subst) -> bool) -> bool {
    match atoms.split_first() {
        None => done(s),
        Some((Leaf::At(pat), rest)) => {
            let pat = Atom {
                pred: pat.pred.clone(),
                args: pat.args.iter().map(|a| walk(a, s)).collect(),
            };
            for fact in db {
                let mut s2 = s.clone();
                if match_atom(&pat, fact, &mut s2) && solve_atoms(rest, db, &s2, done) {
                    return true;
                }
            }
            false
        }
        Some((Leaf::Cmp(..), _)) => unreachable!("comparisons are partitioned out"),
    }
}

/// Bottom-up closure of the active facts under the active rules.
fn fixpoint(statements: &[&Statement], rules: &[(usize, Vec<Vec<Leaf>>)], active: &BTreeSet<usize>) -> Vec<Atom> {
    let mut db: Vec<Atom> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for &i in active {
        let s = statements[i];
        if s.is_fact() && s.head.is_ground() {
            if seen.insert(s.head.to_string()) {
                db.push(s.head.clone());
            }
        }
    }
    loop {
        let mut added = false;
        for (i, disjuncts) in rules {
            if !active.contains(i) {
                continue;
            }
            let head = &statements[*i].head;
            for conj in disjuncts {
                let mut new_heads = Vec::new();
                collect_derivations(conj, &db, &BTreeMap::new(), head, &mut new_heads);
                for h in new_heads {
                    if h.is_ground() && seen.insert(h.to_string()) {
                        db.push(h);
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    db
}

fn collect_derivations(
    conjunct: &[Leaf],
    db: &[Atom],
    s: &Subst,
    head: &Atom,
    out: &mut Vec<Atom>,
) {
    let (atoms, cmps): (Vec<&Leaf>, Vec<&Leaf>) =
        conjunct.iter().partition(|l| matches!(l, Leaf::At(_)));
    collect_atoms(&atoms, db, s, &mut |s| {
        let ok = cmps.iter().all(|l| {
            let Leaf::Cmp(op, x, y) = l else { unreachable!() };
            match (walk(x, s), walk(y, s)) {
                (Term::Number(a), Term::Number(b)) => op.eval(a, b),
                _ => false,
            }
        });
        if ok {
            out.push(Atom {
                pred: head.pred.clone(),
                args: head.args.iter().map(|a| walk(a, s)).collect(),
            });
        }
    });
}

fn collect_atoms(atoms: &[&Leaf], db: &[Atom], s: &Subst, each: &mut dyn FnMut(&Subst)) {
    match atoms.split_first() {
        None => each(s),
        Some((Leaf::At(pat), rest)) => {
            let pat = Atom {
                pred: pat.pred.clone(),
                args: pat.args.iter().map(|a| walk(a, s)).collect(),
            };
            for fact in db {
                let mut s2 = s.clone();
                if match_atom(&pat, fact, &mut s2) {
                    collect_atoms(rest, db, &s2, each);
                }
            }
        }
        Some((Leaf::Cmp(..), _)) => unreachable!("comparisons are partitioned out"),
    }
}
