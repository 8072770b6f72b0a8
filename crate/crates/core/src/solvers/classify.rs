//! Complexity classification through WNU polymorphisms of the power language.
//!
//! The search runs on the base language. An arity-m WNU `g` of Γ lifts
//! coordinatewise to a WNU of `Γ^{|A|^|A|} ∪ {γ_i}` (idempotence fixes the γ
//! singletons). Conversely a WNU `w` of the power language restricts to the
//! WNU `g(a_1..a_m) = w(diag a_1, .., diag a_m)[1]` of Γ, because diagonal
//! tuples of R^k are the k-fold copies of tuples of R. So the base search at
//! arity m is complete for the power language at arity m, and the lifted
//! table is verified directly before it is reported.

use serde::Serialize;

use crate::algebra::{is_wnu, preserves, search_wnu, OperationTable, SwitchabilityWitness};
use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::model::ConstraintLanguage;
use crate::transforms::{power_language, power_width};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ComplexityVerdict {
    #[serde(rename = "P")]
    Polynomial,
    #[serde(rename = "NP-complete-modulo-arity-bound")]
    NpCompleteModuloArityBound,
    #[serde(rename = "not-applicable")]
    NotApplicable,
}

impl ComplexityVerdict {
    pub fn label(self) -> &'static str {
        match self {
            ComplexityVerdict::Polynomial => "P",
            ComplexityVerdict::NpCompleteModuloArityBound => "NP-complete-modulo-arity-bound",
            ComplexityVerdict::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions<'a> {
    pub r: usize,
    pub wnu_arity: usize,
    pub witness: Option<&'a SwitchabilityWitness>,
    pub override_witness: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub verdict: ComplexityVerdict,
    pub r: usize,
    pub wnu_arity: usize,
    /// The exhibited WNU over the power domain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wnu_table: Option<OperationTable>,
    /// The base-domain WNU it was lifted from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_wnu: Option<OperationTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_domain_size: Option<u32>,
    pub candidates_examined: u128,
    pub search_space: u128,
    pub conditional: bool,
    pub caveat: String,
}

pub fn classify(lang: &ConstraintLanguage, options: ClassifyOptions<'_>, budgets: &Budgets) -> Result<ClassificationReport> {
    let m = options.wnu_arity;
    let covered = options.witness.is_some_and(|w| w.covers(lang, options.r));
    if !covered && !options.override_witness {
        return Ok(ClassificationReport {
            verdict: ComplexityVerdict::NotApplicable,
            r: options.r,
            wnu_arity: m,
            wnu_table: None,
            base_wnu: None,
            power_domain_size: None,
            candidates_examined: 0,
            search_space: 0,
            conditional: false,
            caveat: format!(
                "no switchability witness for r = {}; the classification assumes polynomially generated powers",
                options.r
            ),
        });
    }
    let conditional = !covered;
    let assumption = if conditional {
        format!("conditional on {}-switchability, which was assumed without a witness", options.r)
    } else {
        let checked = options
            .witness
            .map(|w| w.powers.iter().map(|p| p.n.to_string()).collect::<Vec<_>>().join(","))
            .unwrap_or_default();
        format!(
            "{}-switchability is witnessed only for the powers n = {checked} by polymorphisms of bounded arity",
            options.r
        )
    };

    let power = power_language(lang, budgets)?;
    let width = power_width(lang.domain())?;
    let search = search_wnu(lang, m, budgets)?;
    match search.table {
        Some(base) => {
            let lifted = base.lift(width, power.domain())?;
            if !is_wnu(&lifted)? {
                return Err(Error::Model("lifted operation is not a WNU".into()));
            }
            for r in power.relations() {
                if !preserves(&lifted, r)? {
                    return Err(Error::Model(format!("lifted WNU does not preserve `{}`", r.name())));
                }
            }
            Ok(ClassificationReport {
                verdict: ComplexityVerdict::Polynomial,
                r: options.r,
                wnu_arity: m,
                wnu_table: Some(lifted),
                base_wnu: Some(base),
                power_domain_size: Some(power.domain().size()),
                candidates_examined: search.candidates_examined,
                search_space: search.search_space,
                conditional,
                caveat: format!("P: an arity-{m} WNU polymorphism of the power language was exhibited; {assumption}"),
            })
        }
        None => Ok(ClassificationReport {
            verdict: ComplexityVerdict::NpCompleteModuloArityBound,
            r: options.r,
            wnu_arity: m,
            wnu_table: None,
            base_wnu: None,
            power_domain_size: Some(power.domain().size()),
            candidates_examined: search.candidates_examined,
            search_space: search.search_space,
            conditional,
            caveat: format!(
                "NP-complete modulo the arity bound: no WNU polymorphism of arity {m} exists, WNUs of other arities were not searched; {assumption}"
            ),
        }),
    }
}
