//! Finite-domain quantified constraint satisfaction.
//!
//! The crate evaluates prenex sentences over finite relational languages and
//! implements the quantifier transformations that reduce them, for languages
//! whose polymorphisms generate powers from few-switch tuples, to ordinary
//! CSP instances:
//!
//! * [`model`]: domains, relations, languages, sentences, switch counting
//! * [`format`]: text and JSON files for languages, sentences and instances
//! * [`algebra`]: polymorphisms, closures, switchability witnesses, WNU search
//! * [`transforms`]: alternation normal form, ω, universal removal and
//!   movement, universal-count reduction, ζ, relational powers
//! * [`solvers`]: the game-tree oracle, a backtracking CSP solver, the
//!   reduction pipelines and the WNU-based classifier
//! * [`report`]: text and JSON reports used by the `qcsp` binary

pub mod algebra;
pub mod budget;
pub mod cli;
pub mod error;
pub mod format;
pub mod model;
pub mod report;
pub mod solvers;
pub mod transforms;

pub use error::{Error, Result};
