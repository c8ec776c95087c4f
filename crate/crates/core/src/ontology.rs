//! Concept ontology: a levelled DAG of nodes, each introducing predicates
//! that concepts below it may use.
//!
//! Ontologies load from a small line-based text format:
//!
//! ```plain
//! # comment
//! node Root level=0
//!   pred isa/2
//!   pred has_name/2 noinherit
//! node Device level=5 parents=Non_living, Manmade
//!   pred energy_type/2
//! ```

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::term::{Atom, GoalExpr, Statement, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSig {
    pub name: String,
    pub arity: usize,
    /// Whether the predicate flows down `isa` edges. Defaults to true for
    /// binary predicates, false otherwise; `noinherit` forces it off.
    pub inheritable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OntologyNode {
    pub name: String,
    pub level: u32,
    pub parents: Vec<String>,
    pub predicates: Vec<PredicateSig>,
}

/// A predicate visible at some node, tagged with where it was introduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectivePredicate {
    pub name: String,
    pub arity: usize,
    pub inheritable: bool,
    pub declared_by: String,
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OntologyError {
    DuplicateNode(String),
    DanglingParent { node: String, parent: String },
    /// Nodes along the offending parent loop, first node repeated last.
    Cycle(Vec<String>),
    UnknownNode(String),
    Syntax { line: usize, msg: String },
}

impl fmt::Display for OntologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OntologyError::DuplicateNode(n) => write!(f, "node `{n}` declared twice"),
            OntologyError::DanglingParent { node, parent } => {
                write!(f, "node `{node}` names unknown parent `{parent}`")
            }
            OntologyError::Cycle(path) => write!(f, "parent cycle: {}", path.join(" -> ")),
            OntologyError::UnknownNode(n) => write!(f, "unknown node `{n}`"),
            OntologyError::Syntax { line, msg } => write!(f, "line {line}: {msg}"),
        }
    }
}

#[derive(Debug, Default, Clone)]
pub struct Ontology {
    nodes: BTreeMap<String, OntologyNode>,
    order: Vec<String>,
}

impl Ontology {
    /// Parses and validates an ontology from its text form.
    pub fn load(text: &str) -> Result<Ontology, OntologyError> {
        let mut ont = Ontology::default();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("node ") {
                let node = parse_node_line(rest, line_no)?;
                if ont.nodes.contains_key(&node.name) {
                    return Err(OntologyError::DuplicateNode(node.name));
                }
                current = Some(node.name.clone());
                ont.order.push(node.name.clone());
                ont.nodes.insert(node.name.clone(), node);
            } else if let Some(rest) = line.strip_prefix("pred ") {
                let sig = parse_pred_line(rest, line_no)?;
                let Some(name) = &current else {
                    return Err(OntologyError::Syntax {
                        line: line_no,
                        msg: "predicate before any node".to_string(),
                    });
                };
                ont.nodes.get_mut(name).unwrap().predicates.push(sig);
            } else {
                return Err(OntologyError::Syntax {
                    line: line_no,
                    msg: "expected `node` or `pred`".to_string(),
                });
            }
        }
        ont.validate()?;
        Ok(ont)
    }

    fn validate(&self) -> Result<(), OntologyError> {
        for node in self.nodes.values() {
            for p in &node.parents {
                if !self.nodes.contains_key(p) {
                    return Err(OntologyError::DanglingParent {
                        node: node.name.clone(),
                        parent: p.clone(),
                    });
                }
            }
        }
        // Colored DFS over parent edges.
        let mut state: BTreeMap<&str, u8> = BTreeMap::new();
        let mut stack: Vec<&str> = Vec::new();
        for name in self.nodes.keys() {
            if state.get(name.as_str()).copied().unwrap_or(0) == 0 {
                self.dfs_cycle(name, &mut state, &mut stack)?;
            }
        }
        Ok(())
    }

    fn dfs_cycle<'a>(
        &'a self,
        name: &'a str,
        state: &mut BTreeMap<&'a str, u8>,
        stack: &mut Vec<&'a str>,
    ) -> Result<(), OntologyError> {
        state.insert(name, 1);
        stack.push(name);
        for p in &self.nodes[name].parents {
            match state.get(p.as_str()).copied().unwrap_or(0) {
                1 => {
                    let start = stack.iter().position(|n| *n == p).unwrap_or(0);
                    let mut path: Vec<String> =
                        stack[start..].iter().map(|n| String::from(*n)).collect();
                    path.push(p.clone());
                    return Err(OntologyError::Cycle(path));
                }
                0 => self.dfs_cycle(p, state, stack)?,
                _ => {}
            }
        }
        stack.pop();
        state.insert(name, 2);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&OntologyNode> {
        self.nodes.get(name)
    }

    /// Node lookup ignoring ASCII case, so knowledge-base symbols written in
    /// lower case still find their ontology node.
    pub fn get_ci(&self, name: &str) -> Option<&OntologyNode> {
        self.nodes.get(name).or_else(|| {
            self.nodes
                .values()
                .find(|n| n.name.eq_ignore_ascii_case(name))
        })
    }

    /// Nodes in file order.
    pub fn nodes(&self) -> impl Iterator<Item = &OntologyNode> {
        self.order.iter().map(|n| &self.nodes[n])
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The node and all its ancestors, nearest first, each visited once.
    pub fn ancestors(&self, name: &str) -> Result<Vec<&OntologyNode>, OntologyError> {
        if !self.nodes.contains_key(name) {
            return Err(OntologyError::UnknownNode(name.to_string()));
        }
        let mut seen = BTreeSet::new();
        let mut queue = alloc::vec![name.to_string()];
        let mut out = Vec::new();
        while let Some(n) = queue.pop() {
            if !seen.insert(n.clone()) {
                continue;
            }
            let node = &self.nodes[&n];
            out.push(node);
            for p in &node.parents {
                queue.push(p.clone());
            }
        }
        Ok(out)
    }

    /// Union of the predicates declared at the node and its ancestors,
    /// sorted by declaring level, then node name, then predicate name.
    /// A name re-declared lower keeps only the lowest-level entry.
    pub fn effective_predicates(
        &self,
        name: &str,
    ) -> Result<Vec<EffectivePredicate>, OntologyError> {
        let mut all: Vec<EffectivePredicate> = self
            .ancestors(name)?
            .into_iter()
            .flat_map(|node| {
                node.predicates.iter().map(|sig| EffectivePredicate {
                    name: sig.name.clone(),
                    arity: sig.arity,
                    inheritable: sig.inheritable,
                    declared_by: node.name.clone(),
                    level: node.level,
                })
            })
            .collect();
        all.sort_by(|a, b| {
            (a.level, &a.declared_by, &a.name).cmp(&(b.level, &b.declared_by, &b.name))
        });
        let mut seen = BTreeSet::new();
        all.retain(|p| seen.insert((p.name.clone(), p.arity)));
        Ok(all)
    }

    /// Inheritance clauses for every eligible predicate in the ontology.
    pub fn inheritance_clauses(&self) -> Vec<Statement> {
        let mut preds = BTreeSet::new();
        for node in self.nodes.values() {
            for sig in &node.predicates {
                if sig.inheritable && sig.arity == 2 && sig.name != "isa" {
                    preds.insert(sig.name.clone());
                }
            }
        }
        let preds: Vec<&str> = preds.iter().map(String::as_str).collect();
        self.inheritance_clauses_for(&preds)
    }

    /// The `isa` transitivity clause followed by one downward-inheritance
    /// clause per listed predicate. Each clause carries a `not_<p>` escape
    /// hatch so explicit exceptions can block inheritance.
    pub fn inheritance_clauses_for(&self, preds: &[&str]) -> Vec<Statement> {
        let var = |v: &str| Term::Variable(v.to_string());
        let mut out = Vec::new();
        out.push(
            Statement::clause(
                Atom::new("isa", alloc::vec![var("X"), var("Z")]),
                GoalExpr::And(alloc::vec![
                    GoalExpr::Atom(Atom::new("isa", alloc::vec![var("X"), var("Y")])),
                    GoalExpr::Atom(Atom::new("isa", alloc::vec![var("Y"), var("Z")])),
                ]),
                1.0,
            )
            .with_source("ontology"),
        );
        for p in preds {
            if *p == "isa" {
                continue;
            }
            let blocker = alloc::format!("not_{p}");
            out.push(
                Statement::clause(
                    Atom::new(*p, alloc::vec![var("X"), var("Y")]),
                    GoalExpr::And(alloc::vec![
                        GoalExpr::Atom(Atom::new("isa", alloc::vec![var("X"), var("Z")])),
                        GoalExpr::Atom(Atom::new(*p, alloc::vec![var("Z"), var("Y")])),
                        GoalExpr::Not(Box::new(GoalExpr::Atom(Atom::new(
                            blocker,
                            alloc::vec![var("X"), var("Y")],
                        )))),
                    ]),
                    1.0,
                )
                .with_source("ontology"),
            );
        }
        out
    }
}

fn parse_node_line(rest: &str, line_no: usize) -> Result<OntologyNode, OntologyError> {
    let syntax = |msg: &str| OntologyError::Syntax { line: line_no, msg: msg.to_string() };
    let mut words = rest.splitn(2, char::is_whitespace);
    let name = words.next().filter(|s| !s.is_empty()).ok_or_else(|| syntax("missing node name"))?;
    let attrs = words.next().unwrap_or("").trim();
    let (level_part, parents_part) = match attrs.find("parents=") {
        Some(p) => (attrs[..p].trim(), Some(attrs[p + "parents=".len()..].trim())),
        None => (attrs, None),
    };
    let level = level_part
        .strip_prefix("level=")
        .and_then(|v| v.trim().parse::<u32>().ok())
        .ok_or_else(|| syntax("expected `level=<n>`"))?;
    let parents = match parents_part {
        Some(list) => list
            .split(',')
            .map(|p| p.trim().to_string())
            .filter(|p| !p.is_empty())
            .collect(),
        None => Vec::new(),
    };
    Ok(OntologyNode { name: name.to_string(), level, parents, predicates: Vec::new() })
}

fn parse_pred_line(rest: &str, line_no: usize) -> Result<PredicateSig, OntologyError> {
    let syntax = |msg: &str| OntologyError::Syntax { line: line_no, msg: msg.to_string() };
    let mut words = rest.split_whitespace();
    let spec = words.next().ok_or_else(|| syntax("missing predicate"))?;
    let (name, arity) = spec
        .split_once('/')
        .and_then(|(n, a)| a.parse::<usize>().ok().map(|a| (n, a)))
        .ok_or_else(|| syntax("expected `name/arity`"))?;
    let mut inheritable = arity == 2;
    for flag in words {
        match flag {
            "noinherit" => inheritable = false,
            _ => return Err(syntax("unknown flag")),
        }
    }
    Ok(PredicateSig { name: name.to_string(), arity, inheritable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    const VEHICLE_CHAIN: &str = "\
node Root level=0
  pred isa/2
  pred can/2
  pred related_to/2
  pred has_name/2 noinherit
node Real level=1 parents=Root
node Entity level=2 parents=Real
node Manmade level=2 parents=Real
  pred used_for/2
  pred used_by/2
node Physical level=3 parents=Entity
  pred location/2
  pred has_part/3
node Non_living level=4 parents=Physical
node Device level=5 parents=Non_living, Manmade
  pred energy_type/2
  pred power_used/3
node Vehicle level=6 parents=Device
  pred travel_area/2
  pred mileage/3
";

    #[test]
    fn loads_and_resolves_multi_parent_node() {
        let ont = Ontology::load(VEHICLE_CHAIN).unwrap();
        assert_eq!(ont.len(), 8);
        let device = ont.get("Device").unwrap();
        assert_eq!(device.parents, vec!["Non_living".to_string(), "Manmade".to_string()]);
        assert_eq!(ont.get("Vehicle").unwrap().level, 6);
    }

    #[test]
    fn effective_predicates_ordered_by_level_then_node() {
        let ont = Ontology::load(VEHICLE_CHAIN).unwrap();
        let eff = ont.effective_predicates("Vehicle").unwrap();
        let names: Vec<&str> = eff.iter().map(|p| p.name.as_str()).collect();
        for must in ["mileage", "travel_area", "used_for", "location", "isa", "can"] {
            assert!(names.contains(&must), "missing {must}");
        }
        let levels: Vec<u32> = eff.iter().map(|p| p.level).collect();
        let mut sorted = levels.clone();
        sorted.sort_unstable();
        assert_eq!(levels, sorted);
        assert_eq!(eff[0].declared_by, "Root");
    }

    #[test]
    fn case_insensitive_lookup() {
        let ont = Ontology::load(VEHICLE_CHAIN).unwrap();
        assert_eq!(ont.get_ci("vehicle").unwrap().name, "Vehicle");
        assert!(ont.get_ci("boat").is_none());
    }

    #[test]
    fn duplicate_node_rejected() {
        let err = Ontology::load("node A level=0\nnode A level=1").unwrap_err();
        assert_eq!(err, OntologyError::DuplicateNode("A".to_string()));
    }

    #[test]
    fn dangling_parent_rejected() {
        let err = Ontology::load("node A level=1 parents=Ghost").unwrap_err();
        assert_eq!(
            err,
            OntologyError::DanglingParent { node: "A".to_string(), parent: "Ghost".to_string() }
        );
    }

    #[test]
    fn parent_cycle_rejected() {
        let text = "node A level=0 parents=B\nnode B level=1 parents=A";
        assert!(matches!(Ontology::load(text), Err(OntologyError::Cycle(_))));
    }

    #[test]
    fn unknown_node_query() {
        let ont = Ontology::load(VEHICLE_CHAIN).unwrap();
        assert_eq!(
            ont.effective_predicates("Boat").unwrap_err(),
            OntologyError::UnknownNode("Boat".to_string())
        );
    }

    #[test]
    fn inheritance_clause_shape() {
        let ont = Ontology::load(VEHICLE_CHAIN).unwrap();
        let clauses = ont.inheritance_clauses_for(&["can"]);
        assert_eq!(clauses.len(), 2);
        assert_eq!(
            clauses[0].body.as_ref().unwrap().to_string(),
            "isa(X, Y), isa(Y, Z)"
        );
        assert_eq!(clauses[1].head.to_string(), "can(X, Y)");
        assert_eq!(
            clauses[1].body.as_ref().unwrap().to_string(),
            "isa(X, Z), can(Z, Y), not(not_can(X, Y))"
        );
        assert_eq!(clauses[1].source, "ontology");
    }

    #[test]
    fn noinherit_and_arity_filter_clause_generation() {
        let ont = Ontology::load(VEHICLE_CHAIN).unwrap();
        let clauses = ont.inheritance_clauses();
        let heads: Vec<String> = clauses.iter().map(|c| c.head.pred.clone()).collect();
        assert!(!heads.contains(&"has_name".to_string()));
        assert!(!heads.contains(&"mileage".to_string()));
        assert!(heads.contains(&"travel_area".to_string()));
        assert_eq!(heads.iter().filter(|h| *h == "isa").count(), 1);
    }
}
