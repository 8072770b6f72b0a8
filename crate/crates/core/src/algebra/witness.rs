//! Bounded evidence for r-switchability: A^n is generated from its tuples with
//! at most `r` switches under the polymorphisms found up to a fixed arity.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{generate_closure, polymorphisms_with, Execution, OperationTable};
use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::model::{enumerate_switch_bounded, ConstraintLanguage};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessVerdict {
    /// Every checked power was generated.
    Witnessed,
    /// Some checked power was not generated by the operations found.
    RefutedAtBounds,
    /// A budget ran out before every power could be checked.
    Inconclusive,
}

impl WitnessVerdict {
    pub fn label(self) -> &'static str {
        match self {
            WitnessVerdict::Witnessed => "witnessed",
            WitnessVerdict::RefutedAtBounds => "refuted-at-bounds",
            WitnessVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PowerCheck {
    pub n: usize,
    pub generated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessConfig {
    pub r: usize,
    /// Polymorphisms of arities `1..=max_arity` are used.
    pub max_arity: usize,
    /// Powers `2..=max_power` are checked.
    pub max_power: usize,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            r: 2,
            max_arity: 3,
            max_power: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwitchabilityWitness {
    pub r: usize,
    pub arities_used: Vec<usize>,
    pub powers: Vec<PowerCheck>,
    pub verdict: WitnessVerdict,
    /// Budget message that stopped the check, when inconclusive.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopped_by: Option<String>,
    pub operation_count: usize,
    #[serde(skip)]
    pub operations: Vec<OperationTable>,
    #[serde(skip)]
    pub domain_size: u32,
    #[serde(skip)]
    pub relation_names: Vec<String>,
}

impl SwitchabilityWitness {
    /// Whether this witness was computed for `lang` and supports bound `r`.
    ///
    /// An r-switchable algebra is r'-switchable for every r' >= r.
    pub fn covers(&self, lang: &ConstraintLanguage, r: usize) -> bool {
        self.verdict == WitnessVerdict::Witnessed
            && self.r <= r
            && self.domain_size == lang.domain().size()
            && self
                .relation_names
                .iter()
                .map(String::as_str)
                .eq(lang.relations().map(|r| r.name()))
    }
}

pub fn switchability_witness(
    lang: &ConstraintLanguage,
    config: WitnessConfig,
    budgets: &Budgets,
) -> Result<SwitchabilityWitness> {
    switchability_witness_with(lang, config, budgets, Execution::Sequential)
}

pub fn switchability_witness_with(
    lang: &ConstraintLanguage,
    config: WitnessConfig,
    budgets: &Budgets,
    exec: Execution,
) -> Result<SwitchabilityWitness> {
    if config.max_arity == 0 {
        return Err(Error::InvalidArgument("max arity must be at least 1".into()));
    }
    let domain = lang.domain();
    let mut operations = Vec::new();
    let mut seen = BTreeSet::new();
    for arity in 1..=config.max_arity {
        for op in polymorphisms_with(lang, arity, budgets, exec)? {
            // projections never add tuples to a closure
            let is_projection = (0..arity).any(|i| OperationTable::projection(domain, arity, i).is_ok_and(|p| p == op));
            if !is_projection && seen.insert(op.clone()) {
                operations.push(op);
            }
        }
    }

    let check = |n: usize| -> Result<bool> {
        let seeds = enumerate_switch_bounded(n, config.r, domain);
        let closure = generate_closure(domain, &seeds, &operations, n, budgets)?;
        Ok(closure.len() as u128 == domain.power_count(n))
    };
    let ns: Vec<usize> = (2..=config.max_power).collect();
    let results: Vec<Result<bool>> = match exec {
        Execution::Parallel => ns.par_iter().map(|&n| check(n)).collect(),
        Execution::Sequential => ns.iter().map(|&n| check(n)).collect(),
    };

    let mut powers = Vec::new();
    let mut stopped_by = None;
    for (&n, res) in ns.iter().zip(results) {
        match res {
            Ok(generated) => powers.push(PowerCheck { n, generated }),
            Err(Error::Budget(b)) => {
                stopped_by = Some(b.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let verdict = if powers.iter().any(|p| !p.generated) {
        WitnessVerdict::RefutedAtBounds
    } else if stopped_by.is_some() {
        WitnessVerdict::Inconclusive
    } else {
        WitnessVerdict::Witnessed
    };
    Ok(SwitchabilityWitness {
        r: config.r,
        arities_used: (1..=config.max_arity).collect(),
        powers,
        verdict,
        stopped_by,
        operation_count: operations.len(),
        operations,
        domain_size: domain.size(),
        relation_names: lang.relations().map(|r| r.name().to_string()).collect(),
    })
}
