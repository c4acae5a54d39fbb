//! Containment checking for activity models.
//!
//! A high-level model is compiled to LTL properties, a low-level model to an
//! SMV description and to the transition system that description induces.
//! The properties are then model-checked against the system, internally or
//! with an external SMV checker.

pub mod checker;
pub mod ingest;
pub mod ltl;
pub mod model;
pub mod names;
pub mod nusmv;
pub mod random_model;
pub mod report;
pub mod semantics;
pub mod smv;
