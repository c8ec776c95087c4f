//! List builtins evaluated by the engine instead of clause resolution.
//!
//! Builtins are deterministic helpers: they never carry probability and
//! leave no statement ids in proof traces.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::engine::EngineError;
use crate::term::Term;
use crate::unify::{apply, unify, Bindings};

pub(crate) fn eval_builtin(
    name: &str,
    args: &[Term],
    b: &Bindings,
) -> Result<Vec<Bindings>, EngineError> {
    let args: Vec<Term> = args.iter().map(|a| apply(a, b)).collect();
    match (name, args.len()) {
        ("append", 3) => append3(&args[0], &args[1], &args[2], b),
        ("append", 2) => append2(&args[0], &args[1], b),
        ("sort", 2) => sort2(&args[0], &args[1], b),
        _ => Err(EngineError::Builtin(format!("unknown builtin `{name}/{}`", args.len()))),
    }
}

fn proper(t: &Term) -> Option<&[Term]> {
    match t {
        Term::List(items, None) => Some(items),
        _ => None,
    }
}

/// Joins a proper prefix onto any list-shaped rest, keeping its tail open.
fn concat(prefix: &[Term], rest: &Term) -> Result<Term, EngineError> {
    let mut items = prefix.to_vec();
    match rest {
        Term::List(more, tail) => {
            items.extend(more.iter().cloned());
            Ok(Term::List(items, tail.clone()))
        }
        Term::Variable(v) => Ok(Term::List(items, Some(v.clone()))),
        other => Err(EngineError::Builtin(format!(
            "append expects lists, found `{other}`"
        ))),
    }
}

fn append3(a: &Term, c: &Term, r: &Term, b: &Bindings) -> Result<Vec<Bindings>, EngineError> {
    if let Some(items) = proper(a) {
        let joined = concat(items, c)?;
        let mut b2 = b.clone();
        return Ok(if unify(&joined, r, &mut b2) { alloc::vec![b2] } else { Vec::new() });
    }
    if let Some(items) = proper(r) {
        let mut out = Vec::new();
        for k in 0..=items.len() {
            let mut b2 = b.clone();
            if unify(a, &Term::List(items[..k].to_vec(), None), &mut b2)
                && unify(c, &Term::List(items[k..].to_vec(), None), &mut b2)
            {
                out.push(b2);
            }
        }
        return Ok(out);
    }
    Err(EngineError::Builtin(
        "append/3 needs a proper list on its first or third argument".to_string(),
    ))
}

fn append2(a: &Term, r: &Term, b: &Bindings) -> Result<Vec<Bindings>, EngineError> {
    let Some(lists) = proper(a) else {
        return Err(EngineError::Builtin(
            "append/2 needs a proper list of lists as its first argument".to_string(),
        ));
    };
    let mut items = Vec::new();
    for l in lists {
        match proper(l) {
            Some(inner) => items.extend(inner.iter().cloned()),
            None => {
                return Err(EngineError::Builtin(format!(
                    "append/2 element `{l}` is not a proper list"
                )))
            }
        }
    }
    let mut b2 = b.clone();
    Ok(if unify(&Term::List(items, None), r, &mut b2) { alloc::vec![b2] } else { Vec::new() })
}

fn sort2(a: &Term, r: &Term, b: &Bindings) -> Result<Vec<Bindings>, EngineError> {
    let Some(items) = proper(a) else {
        return Err(EngineError::Builtin(
            "sort/2 needs a proper list as its first argument".to_string(),
        ));
    };
    let mut sorted = items.to_vec();
    sorted.sort_by(|x, y| x.order_cmp(y));
    sorted.dedup_by(|x, y| x.order_cmp(y) == core::cmp::Ordering::Equal);
    let mut b2 = b.clone();
    Ok(if unify(&Term::List(sorted, None), r, &mut b2) { alloc::vec![b2] } else { Vec::new() })
}
