//! Unification with occurs check over a persistent binding map.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::term::{Atom, GoalExpr, Term};

/// Variable bindings accumulated during a proof.
pub type Bindings = BTreeMap<String, Term>;

/// Resolves a term against `b`, substituting bound variables recursively.
pub fn apply(term: &Term, b: &Bindings) -> Term {
    match term {
        Term::Variable(v) => match b.get(v) {
            Some(t) => apply(t, b),
            None => term.clone(),
        },
        Term::Symbol(_) | Term::Phrase(_) | Term::Number(_) => term.clone(),
        Term::Compound(f, args) => {
            Term::Compound(f.clone(), args.iter().map(|a| apply(a, b)).collect())
        }
        Term::List(items, tail) => {
            let mut out: Vec<Term> = items.iter().map(|i| apply(i, b)).collect();
            match tail {
                Some(v) => match b.get(v) {
                    Some(t) => match apply(t, b) {
                        Term::List(more, tail2) => {
                            out.extend(more);
                            Term::List(out, tail2)
                        }
                        Term::Variable(v2) => Term::List(out, Some(v2)),
                        other => {
                            // Ill-formed tail; keep it as a one-element
                            // extension so the value is not silently lost.
                            out.push(other);
                            Term::List(out, None)
                        }
                    },
                    None => Term::List(out, Some(v.clone())),
                },
                None => Term::List(out, None),
            }
        }
    }
}

pub fn apply_atom(atom: &Atom, b: &Bindings) -> Atom {
    Atom { pred: atom.pred.clone(), args: atom.args.iter().map(|a| apply(a, b)).collect() }
}

pub fn apply_goal(goal: &GoalExpr, b: &Bindings) -> GoalExpr {
    match goal {
        GoalExpr::Atom(a) => GoalExpr::Atom(apply_atom(a, b)),
        GoalExpr::And(gs) => GoalExpr::And(gs.iter().map(|g| apply_goal(g, b)).collect()),
        GoalExpr::Or(gs) => GoalExpr::Or(gs.iter().map(|g| apply_goal(g, b)).collect()),
        GoalExpr::Not(g) => GoalExpr::Not(alloc::boxed::Box::new(apply_goal(g, b))),
        GoalExpr::Compare(op, l, r) => GoalExpr::Compare(*op, apply(l, b), apply(r, b)),
        GoalExpr::Builtin(name, args) => {
            GoalExpr::Builtin(name.clone(), args.iter().map(|a| apply(a, b)).collect())
        }
    }
}

fn occurs(var: &str, term: &Term, b: &Bindings) -> bool {
    match term {
        Term::Variable(v) => {
            if v == var {
                return true;
            }
            match b.get(v) {
                Some(t) => occurs(var, t, b),
                None => false,
            }
        }
        Term::Symbol(_) | Term::Phrase(_) | Term::Number(_) => false,
        Term::Compound(_, args) => args.iter().any(|a| occurs(var, a, b)),
        Term::List(items, tail) => {
            items.iter().any(|i| occurs(var, i, b))
                || tail.as_ref().is_some_and(|v| {
                    v == var || b.get(v).is_some_and(|t| occurs(var, t, b))
                })
        }
    }
}

fn bind(var: &str, term: &Term, b: &mut Bindings) -> bool {
    if let Term::Variable(v) = term {
        if v == var {
            return true;
        }
    }
    if occurs(var, term, b) {
        return false;
    }
    b.insert(String::from(var), term.clone());
    true
}

/// Unifies two terms, extending `b` in place. Returns false (with `b`
/// possibly half-extended) when they do not unify; callers clone first.
pub fn unify(left: &Term, right: &Term, b: &mut Bindings) -> bool {
    let l = apply(left, b);
    let r = apply(right, b);
    match (&l, &r) {
        (Term::Variable(v), _) => bind(v, &r, b),
        (_, Term::Variable(v)) => bind(v, &l, b),
        (Term::Symbol(a), Term::Symbol(c)) => a == c,
        (Term::Phrase(a), Term::Phrase(c)) => a == c,
        (Term::Number(a), Term::Number(c)) => a == c,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, b))
        }
        (Term::List(..), Term::List(..)) => unify_lists(&l, &r, b),
        _ => false,
    }
}

fn unify_lists(l: &Term, r: &Term, b: &mut Bindings) -> bool {
    let (Term::List(xs, xt), Term::List(ys, yt)) = (l, r) else {
        return false;
    };
    let common = xs.len().min(ys.len());
    for i in 0..common {
        if !unify(&xs[i], &ys[i], b) {
            return false;
        }
    }
    let rest_of = |items: &[Term], tail: &Option<String>| {
        Term::List(items[common..].to_vec(), tail.clone())
    };
    match (xs.len() == common, ys.len() == common) {
        (true, true) => match (xt, yt) {
            (None, None) => true,
            (Some(v), None) => bind(v, &Term::List(Vec::new(), None), b),
            (None, Some(v)) => bind(v, &Term::List(Vec::new(), None), b),
            (Some(v), Some(w)) => unify(
                &Term::Variable(v.clone()),
                &Term::Variable(w.clone()),
                b,
            ),
        },
        // One side ran out of fixed elements; its tail must cover the rest.
        (true, false) => match xt {
            Some(v) => bind(v, &rest_of(ys, yt), b),
            None => false,
        },
        (false, true) => match yt {
            Some(v) => bind(v, &rest_of(xs, xt), b),
            None => false,
        },
        (false, false) => unreachable!(),
    }
}

pub fn unify_atoms(a: &Atom, c: &Atom, b: &mut Bindings) -> bool {
    a.pred == c.pred
        && a.args.len() == c.args.len()
        && a.args.iter().zip(&c.args).all(|(x, y)| unify(x, y, b))
}

/// Renames every variable in a statement to a fresh `_R<n>_` name so clause
/// variables never collide with query variables.
pub struct Renamer {
    counter: u64,
}

impl Renamer {
    pub fn new() -> Self {
        Renamer { counter: 0 }
    }

    pub fn fresh(&mut self, base: &str) -> String {
        self.counter += 1;
        format!("_R{}_{base}", self.counter)
    }

    pub fn rename_term(&mut self, term: &Term, map: &mut BTreeMap<String, String>) -> Term {
        match term {
            Term::Variable(v) => {
                let name = map.entry(v.clone()).or_insert_with(|| self.next_name(v));
                Term::Variable(name.clone())
            }
            Term::Symbol(_) | Term::Phrase(_) | Term::Number(_) => term.clone(),
            Term::Compound(f, args) => Term::Compound(
                f.clone(),
                args.iter().map(|a| self.rename_term(a, map)).collect(),
            ),
            Term::List(items, tail) => {
                let items = items.iter().map(|i| self.rename_term(i, map)).collect();
                let tail = tail.as_ref().map(|v| {
                    map.entry(v.clone()).or_insert_with(|| self.next_name(v)).clone()
                });
                Term::List(items, tail)
            }
        }
    }

    fn next_name(&mut self, base: &str) -> String {
        self.counter += 1;
        format!("_R{}_{base}", self.counter)
    }

    pub fn rename_atom(&mut self, atom: &Atom, map: &mut BTreeMap<String, String>) -> Atom {
        Atom {
            pred: atom.pred.clone(),
            args: atom.args.iter().map(|a| self.rename_term(a, map)).collect(),
        }
    }

    pub fn rename_goal(&mut self, goal: &GoalExpr, map: &mut BTreeMap<String, String>) -> GoalExpr {
        match goal {
            GoalExpr::Atom(a) => GoalExpr::Atom(self.rename_atom(a, map)),
            GoalExpr::And(gs) => {
                GoalExpr::And(gs.iter().map(|g| self.rename_goal(g, map)).collect())
            }
            GoalExpr::Or(gs) => {
                GoalExpr::Or(gs.iter().map(|g| self.rename_goal(g, map)).collect())
            }
            GoalExpr::Not(g) => GoalExpr::Not(alloc::boxed::Box::new(self.rename_goal(g, map))),
            GoalExpr::Compare(op, l, r) => {
                GoalExpr::Compare(*op, self.rename_term(l, map), self.rename_term(r, map))
            }
            GoalExpr::Builtin(name, args) => GoalExpr::Builtin(
                name.clone(),
                args.iter().map(|a| self.rename_term(a, map)).collect(),
            ),
        }
    }
}

impl Default for Renamer {
    fn default() -> Self {
        Renamer::new()
    }
}
