//! Reductions of QCSP(Γ) under an r-switchability assumption: to a bundle of
//! CSP(Γ*) instances, to one Π₂ sentence with at most |A| universals, and to
//! a CSP over the power language.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Execution, SwitchabilityWitness};
use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::model::{Atom, CspInstance, QuantifiedSentence, QuantifiedVar, Quantifier};
use crate::solvers::{solve_csp, Method, SolveStats, SolveVerdict};
use crate::transforms::{
    eliminate_universals, index_sets, move_universals_left, normalize_alternating, omega, qcsp_to_power_csp,
    reduce_universal_count,
};

/// Switch bound and the evidence that justifies using it.
#[derive(Clone, Copy, Debug)]
pub struct ReductionOptions<'a> {
    pub r: usize,
    pub witness: Option<&'a SwitchabilityWitness>,
    /// Proceed without a covering witness; results are then marked conditional.
    pub override_witness: bool,
    pub exec: Execution,
}

impl<'a> ReductionOptions<'a> {
    pub fn new(r: usize, witness: Option<&'a SwitchabilityWitness>) -> Self {
        Self {
            r,
            witness,
            override_witness: false,
            exec: Execution::Sequential,
        }
    }

    pub fn overridden(r: usize) -> Self {
        Self {
            r,
            witness: None,
            override_witness: true,
            exec: Execution::Sequential,
        }
    }

    pub fn with_exec(self, exec: Execution) -> Self {
        Self { exec, ..self }
    }

    /// Whether the result is conditional on an unverified switchability assumption.
    ///
    /// Fails when there is neither a covering witness nor an override.
    pub fn gate(&self, s: &QuantifiedSentence) -> Result<bool> {
        let covered = self.witness.is_some_and(|w| w.covers(s.language(), self.r));
        match (covered, self.override_witness) {
            (true, _) => Ok(false),
            (false, true) => Ok(true),
            (false, false) => Err(Error::MissingWitness { r: self.r }),
        }
    }
}

pub const CONDITIONAL_CAVEAT: &str =
    "conditional: no switchability witness covers this language and bound, so equivalence with the input is not established";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BundleMember {
    /// 1-based indices `n_1 < .. < n_k` of the universals ω keeps.
    pub indices: Vec<usize>,
    #[serde(skip)]
    pub omega: QuantifiedSentence,
    #[serde(skip)]
    pub instance: CspInstance,
    pub universals: usize,
    pub variables: usize,
    pub atoms: usize,
    pub satisfiable: bool,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionBundle {
    #[serde(skip)]
    pub source: QuantifiedSentence,
    pub r: usize,
    /// Number of ∃∀ pairs after normalization.
    pub pairs: usize,
    pub members: Vec<BundleMember>,
    pub combined: bool,
    pub conditional: bool,
}

/// One CSP(Γ*) instance per ω index set with at most `r` indices; the
/// sentence holds iff all of them are satisfiable when Γ is r-switchable.
pub fn reduce_pgp_to_csp(
    s: &QuantifiedSentence,
    options: ReductionOptions<'_>,
    budgets: &Budgets,
) -> Result<ReductionBundle> {
    let conditional = options.gate(s)?;
    let alternating = normalize_alternating(s);
    let sets = index_sets(alternating.n(), options.r);
    let build = |indices: &Vec<usize>| -> Result<BundleMember> {
        let w = omega(&alternating, indices)?;
        let instance = eliminate_universals(&w, budgets)?;
        let verdict = solve_csp(&instance, budgets)?;
        Ok(BundleMember {
            indices: indices.clone(),
            universals: w.universal_count(),
            variables: instance.variables().len(),
            atoms: instance.atoms().len(),
            omega: w,
            instance,
            satisfiable: verdict.truth,
            nodes: verdict.stats.nodes,
        })
    };
    let members: Vec<BundleMember> = match options.exec {
        Execution::Parallel => sets.par_iter().map(build).collect::<Result<_>>()?,
        Execution::Sequential => sets.iter().map(build).collect::<Result<_>>()?,
    };
    Ok(ReductionBundle {
        source: s.clone(),
        r: options.r,
        pairs: alternating.n(),
        combined: members.iter().all(|m| m.satisfiable),
        members,
        conditional,
    })
}

impl ReductionBundle {
    pub fn verdict(&self) -> SolveVerdict {
        SolveVerdict {
            truth: self.combined,
            method: Method::PgpCsp,
            witness: None,
            stats: SolveStats {
                nodes: self.members.iter().map(|m| m.nodes).sum(),
                instances: self.members.len() as u64,
            },
        }
    }
}

/// An equivalent (under r-switchability) Π₂ sentence with at most |A| universals.
///
/// Each ω sentence is made Π₂; the conjunction shares universals by position
/// (`u$1`, `u$2`, ..) and keeps existentials apart per member, then the
/// universal count is reduced.
pub fn reduce_to_pi2(
    s: &QuantifiedSentence,
    options: ReductionOptions<'_>,
    budgets: &Budgets,
) -> Result<QuantifiedSentence> {
    options.gate(s)?;
    let alternating = normalize_alternating(s);
    let sets = index_sets(alternating.n(), options.r);
    let convert = |indices: &Vec<usize>| -> Result<QuantifiedSentence> {
        move_universals_left(&omega(&alternating, indices)?, budgets)
    };
    let parts: Vec<QuantifiedSentence> = match options.exec {
        Execution::Parallel => sets.par_iter().map(convert).collect::<Result<_>>()?,
        Execution::Sequential => sets.iter().map(convert).collect::<Result<_>>()?,
    };

    let pool = parts.iter().map(|p| p.universal_count()).max().unwrap_or(0);
    let shared: Vec<String> = (1..=pool).map(|i| format!("u${i}")).collect();
    let mut prefix: Vec<QuantifiedVar> = shared.iter().cloned().map(QuantifiedVar::forall).collect();
    let mut matrix: Vec<Atom> = Vec::new();
    for (m, part) in parts.iter().enumerate() {
        let mut map: HashMap<&str, String> = HashMap::new();
        let mut next_universal = 0;
        for q in part.prefix() {
            let name = match q.quantifier {
                Quantifier::Forall => {
                    next_universal += 1;
                    shared[next_universal - 1].clone()
                }
                Quantifier::Exists => {
                    let name = format!("{}$m{}", q.var, m + 1);
                    prefix.push(QuantifiedVar::exists(name.clone()));
                    name
                }
            };
            map.insert(q.var.as_str(), name);
        }
        matrix.extend(part.matrix().iter().map(|a| a.renamed(|v| map[v].clone())));
    }
    let combined = QuantifiedSentence::new_unchecked(s.language().clone(), prefix, matrix);
    reduce_universal_count(&combined, budgets)
}

/// Solves through [`reduce_to_pi2`] followed by universal removal and CSP search.
pub fn solve_pi2(s: &QuantifiedSentence, options: ReductionOptions<'_>, budgets: &Budgets) -> Result<SolveVerdict> {
    let pi2 = reduce_to_pi2(s, options, budgets)?;
    let inst = eliminate_universals(&pi2, budgets)?;
    let v = solve_csp(&inst, budgets)?;
    Ok(SolveVerdict {
        truth: v.truth,
        method: Method::Pi2,
        witness: None,
        stats: v.stats,
    })
}

/// Solves through [`reduce_to_pi2`] followed by the power-language CSP.
pub fn solve_power_csp(
    s: &QuantifiedSentence,
    options: ReductionOptions<'_>,
    budgets: &Budgets,
) -> Result<SolveVerdict> {
    let pi2 = reduce_to_pi2(s, options, budgets)?;
    let inst = qcsp_to_power_csp(&pi2, budgets)?;
    let v = solve_csp(&inst, budgets)?;
    Ok(SolveVerdict {
        truth: v.truth,
        method: Method::PowerCsp,
        witness: None,
        stats: v.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{switchability_witness, WitnessConfig};
    use crate::format::{parse_language, parse_sentence};
    use std::sync::Arc;

    use crate::model::ConstraintLanguage;
    use crate::solvers::oracle_qcsp;

    fn lang() -> Arc<ConstraintLanguage> {
        Arc::new(parse_language("domain 2\nrelation XOR0 3\n0 0 0\n0 1 1\n1 0 1\n1 1 0\nend\n").unwrap())
    }

    fn witness() -> SwitchabilityWitness {
        switchability_witness(&lang(), WitnessConfig::default(), &Budgets::default()).unwrap()
    }

    const THREE_PAIRS: &str = "exists y1\nforall x1\nexists y2\nforall x2\nexists y3\nforall x3\n\
                               constraint XOR0 y1 x1 y2\nconstraint XOR0 y2 x2 y3\nconstraint XOR0 y3 x3 y1\n";

    #[test]
    fn bundle_sizes() {
        let s = parse_sentence(THREE_PAIRS, lang()).unwrap();
        let w = witness();
        let b = reduce_pgp_to_csp(&s, ReductionOptions::new(2, Some(&w)), &Budgets::default()).unwrap();
        assert_eq!(b.members.len(), 7);
        assert!(!b.conditional);
        for m in &b.members {
            assert_eq!(m.universals, 2 * m.indices.len() + 1);
        }
        let b0 = reduce_pgp_to_csp(&s, ReductionOptions::new(2, Some(&w)).with_exec(Execution::Parallel), &Budgets::default())
            .unwrap();
        assert_eq!(b0, b);
        let b = reduce_pgp_to_csp(&s, ReductionOptions::overridden(0), &Budgets::default()).unwrap();
        assert_eq!(b.members.len(), 1);
        assert_eq!(b.members[0].universals, 1);
        assert!(b.conditional);
    }

    #[test]
    fn witness_gate() {
        let s = parse_sentence(THREE_PAIRS, lang()).unwrap();
        let err = reduce_pgp_to_csp(&s, ReductionOptions::new(2, None), &Budgets::default()).unwrap_err();
        assert!(matches!(err, Error::MissingWitness { r: 2 }));
        // a witness for r = 2 does not cover r = 1
        let w = witness();
        assert!(reduce_pgp_to_csp(&s, ReductionOptions::new(1, Some(&w)), &Budgets::default()).is_err());
    }

    #[test]
    fn pipelines_agree_with_oracle() {
        let w = witness();
        let opts = ReductionOptions::new(2, Some(&w));
        for text in [
            THREE_PAIRS,
            "forall x\nexists y\nconstraint XOR0 x x y\n",
            "exists y\nforall x\nconstraint XOR0 x y y\n",
            "forall a\nforall b\nexists c\nconstraint XOR0 a b c\n",
        ] {
            let s = parse_sentence(text, lang()).unwrap();
            let truth = oracle_qcsp(&s, &Budgets::default()).unwrap().truth;
            let b = reduce_pgp_to_csp(&s, opts, &Budgets::default()).unwrap();
            assert_eq!(b.combined, truth, "{text}");
            let pi2 = reduce_to_pi2(&s, opts, &Budgets::default()).unwrap();
            assert!(pi2.universal_count() <= 2);
            assert!(pi2.validate().is_empty());
            assert_eq!(oracle_qcsp(&pi2, &Budgets::default()).unwrap().truth, truth, "{text}");
            assert_eq!(solve_pi2(&s, opts, &Budgets::default()).unwrap().truth, truth);
            assert_eq!(solve_power_csp(&s, opts, &Budgets::default()).unwrap().truth, truth);
        }
    }
}
