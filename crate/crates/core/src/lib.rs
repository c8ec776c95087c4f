//! Probabilistic-logic commonsense knowledge engine.
//!
//! The crate hosts the knowledge language (terms, statements, reader and
//! writer), a layered statement store, a proof-enumerating inference engine
//! with noisy-or probability combination, a concept ontology, and the
//! acquisition pipelines that turn crowd ratings and dependency-parsed text
//! into statements.
//!
//! Everything works without the standard library; only `alloc` is required.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod builtins;
pub mod certainty;
pub mod crowd;
pub mod engine;
pub mod ontology;
pub mod oracle;
pub mod parse;
pub mod semparse;
pub mod store;
pub mod term;
pub mod unify;
