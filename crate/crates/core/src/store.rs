//! Layered statement store indexed by predicate and arity.
//!
//! The base layer holds curated knowledge and can be sealed; the session
//! layer holds scenario facts asserted at query time and can be cleared
//! without touching the base.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ontology::Ontology;
use crate::term::Statement;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Base,
    Session,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StoreError {
    DuplicateId(String),
    BaseSealed,
    InvalidProb(f64),
}

impl fmt::Display for StoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StoreError::DuplicateId(id) => write!(f, "duplicate statement id `{id}`"),
            StoreError::BaseSealed => write!(f, "base layer is sealed"),
            StoreError::InvalidProb(p) => write!(f, "probability {p} outside [0, 1]"),
        }
    }
}

#[derive(Debug, Default)]
pub struct KnowledgeStore {
    base: Vec<Statement>,
    session: Vec<Statement>,
    base_index: BTreeMap<(String, usize), Vec<usize>>,
    session_index: BTreeMap<(String, usize), Vec<usize>>,
    ids: BTreeMap<String, (Layer, usize)>,
    sealed: bool,
    fact_counter: u64,
    clause_counter: u64,
    selectional: BTreeMap<(String, String), Vec<String>>,
    ontology: Option<Ontology>,
}

impl KnowledgeStore {
    pub fn new() -> Self {
        KnowledgeStore::default()
    }

    /// Adds a statement, assigning an `f_<n>` or `c_<n>` id when none is set.
    /// Returns the id under which the statement was stored.
    pub fn add_statement(&mut self, mut stmt: Statement, layer: Layer) -> Result<String, StoreError> {
        if self.sealed && layer == Layer::Base {
            return Err(StoreError::BaseSealed);
        }
        if !(0.0..=1.0).contains(&stmt.prob) {
            return Err(StoreError::InvalidProb(stmt.prob));
        }
        if stmt.id.is_empty() {
            stmt.id = self.next_auto_id(stmt.is_fact());
        } else if self.ids.contains_key(&stmt.id) {
            return Err(StoreError::DuplicateId(stmt.id));
        }
        let id = stmt.id.clone();
        let key = stmt.head.key();
        let (items, index) = match layer {
            Layer::Base => (&mut self.base, &mut self.base_index),
            Layer::Session => (&mut self.session, &mut self.session_index),
        };
        self.ids.insert(id.clone(), (layer, items.len()));
        index.entry(key).or_default().push(items.len());
        items.push(stmt);
        Ok(id)
    }

    fn next_auto_id(&mut self, fact: bool) -> String {
        loop {
            let candidate = if fact {
                self.fact_counter += 1;
                format!("f_{}", self.fact_counter)
            } else {
                self.clause_counter += 1;
                format!("c_{}", self.clause_counter)
            };
            if !self.ids.contains_key(&candidate) {
                return candidate;
            }
        }
    }

    /// Statements whose head matches the predicate and arity, base layer
    /// first, each layer in insertion order.
    pub fn lookup(&self, pred: &str, arity: usize) -> Vec<&Statement> {
        let key = (String::from(pred), arity);
        let mut out = Vec::new();
        if let Some(ix) = self.base_index.get(&key) {
            out.extend(ix.iter().map(|&i| &self.base[i]));
        }
        if let Some(ix) = self.session_index.get(&key) {
            out.extend(ix.iter().map(|&i| &self.session[i]));
        }
        out
    }

    pub fn get(&self, id: &str) -> Option<&Statement> {
        self.ids.get(id).map(|&(layer, i)| match layer {
            Layer::Base => &self.base[i],
            Layer::Session => &self.session[i],
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &Statement> {
        self.base.iter().chain(self.session.iter())
    }

    pub fn len(&self) -> usize {
        self.base.len() + self.session.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty() && self.session.is_empty()
    }

    /// Freezes the base layer; later base inserts fail with `BaseSealed`.
    pub fn seal(&mut self) {
        self.sealed = true;
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    /// Drops every session statement. Base ids and auto-id counters keep
    /// their values, so re-asserted session facts get fresh ids.
    pub fn clear_session(&mut self) {
        for stmt in &self.session {
            self.ids.remove(&stmt.id);
        }
        self.session.clear();
        self.session_index.clear();
    }

    pub fn session_len(&self) -> usize {
        self.session.len()
    }

    pub fn session_statements(&self) -> &[Statement] {
        &self.session
    }

    /// Registers `type` as admissible for `role` slots of `event` concepts.
    pub fn add_selectional(&mut self, role: &str, event: &str, ty: &str) {
        self.selectional
            .entry((String::from(role), String::from(event)))
            .or_default()
            .push(String::from(ty));
    }

    pub fn selectional_for(&self, role: &str, event: &str) -> &[String] {
        self.selectional
            .get(&(String::from(role), String::from(event)))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn selectional_entries(&self) -> impl Iterator<Item = (&str, &str, &[String])> {
        self.selectional
            .iter()
            .map(|((role, event), tys)| (role.as_str(), event.as_str(), tys.as_slice()))
    }

    pub fn set_ontology(&mut self, ontology: Ontology) {
        self.ontology = Some(ontology);
    }

    pub fn ontology(&self) -> Option<&Ontology> {
        self.ontology.as_ref()
    }
}
