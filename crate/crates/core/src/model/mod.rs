//! Domains, relations, languages, sentences and switch combinatorics.

mod domain;
mod language;
mod relation;
mod sentence;
mod switch;

pub use domain::{all_tuples, next_tuple, DomainSpec, Element, ValueTuple};
pub use language::{constant_name, ConstraintLanguage};
pub use relation::Relation;
pub(crate) use relation::TupleIndex;
pub use sentence::{Atom, CspInstance, QuantifiedSentence, QuantifiedVar, Quantifier, Violation};
pub use switch::{enumerate_switch_bounded, switch_bounded_count, switch_count};
