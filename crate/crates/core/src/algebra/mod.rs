//! Polymorphisms, subpower closure, switchability witnesses and WNU search.

mod closure;
mod operation;
mod polymorphism;
mod witness;
mod wnu;

pub use closure::generate_closure;
pub use operation::OperationTable;
pub use polymorphism::{polymorphisms, polymorphisms_with, preserves, preserves_with};
pub use witness::{
    switchability_witness, switchability_witness_with, PowerCheck, SwitchabilityWitness, WitnessConfig,
    WitnessVerdict,
};
pub use wnu::{find_wnu, is_wnu, search_wnu, WnuSearch};

/// Whether independent pieces of work may run on the rayon pool.
///
/// Results never depend on the choice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}
