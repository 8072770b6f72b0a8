//! The game-tree oracle, a CSP solver, the reduction pipelines and the classifier.

mod classify;
mod csp;
mod oracle;
mod reduce;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::Element;

pub use classify::{classify, ClassificationReport, ClassifyOptions, ComplexityVerdict};
pub use csp::solve_csp;
pub use oracle::oracle_qcsp;
pub use reduce::{
    reduce_pgp_to_csp, reduce_to_pi2, solve_pi2, solve_power_csp, BundleMember, ReductionBundle, ReductionOptions,
    CONDITIONAL_CAVEAT,
};

/// How a truth value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Game-tree evaluation of the sentence as given.
    Oracle,
    /// Backtracking search on a CSP instance.
    Csp,
    /// Conjunction of the ω bundle's CSP(Γ*) instances.
    PgpCsp,
    /// Π₂ sentence with at most |A| universals, then universal removal.
    Pi2,
    /// Π₂ sentence, then the CSP over the power language.
    PowerCsp,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Csp => "csp",
            Method::PgpCsp => "pgp-csp",
            Method::Pi2 => "pi2",
            Method::PowerCsp => "power-csp",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    /// Search nodes expanded.
    pub nodes: u64,
    /// Instances solved to reach the verdict.
    pub instances: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveVerdict {
    pub truth: bool,
    pub method: Method,
    /// A satisfying assignment, for satisfiable CSP instances only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, Element>>,
    pub stats: SolveStats,
}
