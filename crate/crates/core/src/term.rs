//! Terms, atoms, goal expressions and statements of the knowledge language.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A value of the logic language.
///
/// Variables start upper-case or with `_`, symbols lower-case. A `Phrase` is a
/// quoted free-text label and never equal to a symbol with the same characters.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Variable(String),
    Symbol(String),
    Phrase(String),
    Number(f64),
    Compound(String, Vec<Term>),
    /// `[a, b | T]`: elements plus an optional tail variable.
    List(Vec<Term>, Option<String>),
}

impl Term {
    /// True when no variable occurs anywhere in the term.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Variable(_) => false,
            Term::Symbol(_) | Term::Phrase(_) | Term::Number(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
            Term::List(items, tail) => tail.is_none() && items.iter().all(Term::is_ground),
        }
    }

    /// Collects variable names in first-occurrence order.
    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Variable(v) => {
                if !out.iter().any(|x| x == v) {
                    out.push(v.clone());
                }
            }
            Term::Symbol(_) | Term::Phrase(_) | Term::Number(_) => {}
            Term::Compound(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            Term::List(items, tail) => {
                for i in items {
                    i.collect_vars(out);
                }
                if let Some(t) = tail {
                    if !out.iter().any(|x| x == t) {
                        out.push(t.clone());
                    }
                }
            }
        }
    }

    /// Total order used by `sort/2`: numbers < symbols < phrases < compounds
    /// < lists, lexicographic within a kind. Variables sort last.
    pub fn order_cmp(&self, other: &Term) -> core::cmp::Ordering {
        fn rank(t: &Term) -> u8 {
            match t {
                Term::Number(_) => 0,
                Term::Symbol(_) => 1,
                Term::Phrase(_) => 2,
                Term::Compound(..) => 3,
                Term::List(..) => 4,
                Term::Variable(_) => 5,
            }
        }
        match (self, other) {
            (Term::Number(a), Term::Number(b)) => a.total_cmp(b),
            (Term::Symbol(a), Term::Symbol(b)) => a.cmp(b),
            (Term::Phrase(a), Term::Phrase(b)) => a.cmp(b),
            (Term::Variable(a), Term::Variable(b)) => a.cmp(b),
            (Term::Compound(f, xs), Term::Compound(g, ys)) => f
                .cmp(g)
                .then_with(|| xs.len().cmp(&ys.len()))
                .then_with(|| seq_cmp(xs, ys)),
            (Term::List(xs, xt), Term::List(ys, yt)) => {
                seq_cmp(xs, ys).then_with(|| xt.cmp(yt))
            }
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

fn seq_cmp(xs: &[Term], ys: &[Term]) -> core::cmp::Ordering {
    for (x, y) in xs.iter().zip(ys.iter()) {
        let c = x.order_cmp(y);
        if c != core::cmp::Ordering::Equal {
            return c;
        }
    }
    xs.len().cmp(&ys.len())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(v) => write!(f, "{v}"),
            Term::Symbol(s) => write!(f, "{s}"),
            Term::Phrase(p) => write!(f, "\"{p}\""),
            Term::Number(n) => write!(f, "{n}"),
            Term::Compound(functor, args) => {
                write!(f, "{functor}(")?;
                write_terms(f, args)?;
                write!(f, ")")
            }
            Term::List(items, tail) => {
                write!(f, "[")?;
                write_terms(f, items)?;
                if let Some(t) = tail {
                    write!(f, "|{t}")?;
                }
                write!(f, "]")
            }
        }
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[Term]) -> fmt::Result {
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

/// A predicate applied to argument terms, e.g. `isa(car, vehicle)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { pred: pred.into(), args }
    }

    /// Index key of the atom.
    pub fn key(&self) -> (String, usize) {
        (self.pred.clone(), self.args.len())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut Vec<String>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.pred);
        }
        write!(f, "{}(", self.pred)?;
        write_terms(f, &self.args)?;
        write!(f, ")")
    }
}

/// Comparison operators; operands must be numbers when evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
    Ne,
}

impl CompareOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::Lt => "<",
            CompareOp::Le => "=<",
            CompareOp::Eq => "==",
            CompareOp::Ne => "\\==",
        }
    }

    pub fn eval(self, a: f64, b: f64) -> bool {
        match self {
            CompareOp::Gt => a > b,
            CompareOp::Ge => a >= b,
            CompareOp::Lt => a < b,
            CompareOp::Le => a <= b,
            CompareOp::Eq => a == b,
            CompareOp::Ne => a != b,
        }
    }
}

/// Body goal tree: `,` is `And`, `;` is `Or`, `not(..)` is negation as failure.
///
/// `append/2`, `append/3` and `sort/2` parse as `Builtin` nodes; the names are
/// reserved and cannot be redefined by knowledge clauses.
#[derive(Debug, Clone, PartialEq)]
pub enum GoalExpr {
    Atom(Atom),
    And(Vec<GoalExpr>),
    Or(Vec<GoalExpr>),
    Not(Box<GoalExpr>),
    Compare(CompareOp, Term, Term),
    Builtin(String, Vec<Term>),
}

impl GoalExpr {
    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            GoalExpr::Atom(a) => a.collect_vars(out),
            GoalExpr::And(gs) | GoalExpr::Or(gs) => {
                for g in gs {
                    g.collect_vars(out);
                }
            }
            GoalExpr::Not(g) => g.collect_vars(out),
            GoalExpr::Compare(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            GoalExpr::Builtin(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }
}

impl fmt::Display for GoalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoalExpr::Atom(a) => write!(f, "{a}"),
            GoalExpr::And(gs) => {
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    if matches!(g, GoalExpr::Or(_)) {
                        write!(f, "({g})")?;
                    } else {
                        write!(f, "{g}")?;
                    }
                }
                Ok(())
            }
            GoalExpr::Or(gs) => {
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    if matches!(g, GoalExpr::And(_)) {
                        write!(f, "({g})")?;
                    } else {
                        write!(f, "{g}")?;
                    }
                }
                Ok(())
            }
            GoalExpr::Not(g) => write!(f, "not({g})"),
            GoalExpr::Compare(op, l, r) => write!(f, "{l} {} {r}", op.as_str()),
            GoalExpr::Builtin(name, args) => {
                write!(f, "{name}(")?;
                write_terms(f, args)?;
                write!(f, ")")
            }
        }
    }
}

/// A probabilistic belief: fact when `body` is absent, clause otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub head: Atom,
    pub body: Option<GoalExpr>,
    /// Base probability in `[0, 1]`; a prob-0 fact is stored, not discarded.
    pub prob: f64,
    /// Unique identifier, e.g. `f1`; empty until assigned by the store.
    pub id: String,
    /// Knowledge source, e.g. `kb`, `wnet`, `interp_2`.
    pub source: String,
    /// Time point the belief holds at; `t_g` means generally valid.
    pub time_tag: String,
}

impl Statement {
    pub fn fact(head: Atom, prob: f64) -> Self {
        Statement {
            head,
            body: None,
            prob,
            id: String::new(),
            source: String::from("kb"),
            time_tag: String::from("t_g"),
        }
    }

    pub fn clause(head: Atom, body: GoalExpr, prob: f64) -> Self {
        Statement { body: Some(body), ..Statement::fact(head, prob) }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::{string::ToString, vec};

    fn sym(s: &str) -> Term {
        Term::Symbol(s.to_string())
    }

    #[test]
    fn phrase_never_equals_symbol() {
        assert_ne!(Term::Phrase("bowl".to_string()), sym("bowl"));
    }

    #[test]
    fn ground_checks() {
        assert!(sym("car").is_ground());
        assert!(!Term::Variable("X".to_string()).is_ground());
        assert!(!Term::Compound("f".to_string(), vec![Term::Variable("X".to_string())]).is_ground());
        assert!(!Term::List(vec![sym("a")], Some("T".to_string())).is_ground());
    }

    #[test]
    fn standard_order_of_kinds() {
        use core::cmp::Ordering::Less;
        let n = Term::Number(9.0);
        let s = sym("a");
        let p = Term::Phrase("a".to_string());
        let c = Term::Compound("f".to_string(), vec![sym("a")]);
        assert_eq!(n.order_cmp(&s), Less);
        assert_eq!(s.order_cmp(&p), Less);
        assert_eq!(p.order_cmp(&c), Less);
        assert_eq!(sym("a").order_cmp(&sym("b")), Less);
    }

    #[test]
    fn display_forms() {
        let a = Atom::new("isa", vec![sym("car"), sym("vehicle")]);
        assert_eq!(a.to_string(), "isa(car, vehicle)");
        let lst = Term::List(vec![sym("a"), sym("b")], Some("T".to_string()));
        assert_eq!(lst.to_string(), "[a, b|T]");
        let g = GoalExpr::And(vec![
            GoalExpr::Or(vec![
                GoalExpr::Atom(Atom::new("has", vec![sym("x"), sym("leg")])),
                GoalExpr::Atom(Atom::new("has", vec![sym("x"), sym("wheel")])),
            ]),
            GoalExpr::Not(Box::new(GoalExpr::Atom(Atom::new(
                "state",
                vec![sym("x"), sym("stuck")],
            )))),
        ]);
        assert_eq!(g.to_string(), "(has(x, leg); has(x, wheel)), not(state(x, stuck))");
    }

    #[test]
    fn number_display_is_plain_decimal() {
        assert_eq!(Term::Number(0.72).to_string(), "0.72");
        assert_eq!(Term::Number(30.0).to_string(), "30");
        assert_eq!(Term::Number(0.0000001).to_string(), "0.0000001");
    }
}
