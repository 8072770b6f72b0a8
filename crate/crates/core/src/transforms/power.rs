//! Relational powers, γ columns, and the translation between Π₂ sentences with
//! |A| universals and CSP instances over the power language.
//!
//! Power-domain elements are lexicographic ranks of tuples over the base
//! domain, so the element of `A^k` written `(a_1, .., a_k)` is
//! `a_1·|A|^(k-1) + .. + a_k`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::budget::{saturating_pow, Budgets};
use crate::error::{Error, Result};
use crate::model::{
    Atom, ConstraintLanguage, CspInstance, DomainSpec, Element, QuantifiedSentence, QuantifiedVar, Relation, ValueTuple,
};
use crate::transforms::naming::Names;

/// Column `index` (1-based) of the matrix whose rows list `A^k` lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaColumn {
    pub index: usize,
    pub values: ValueTuple,
}

/// Name of the unary relation `{γ_i}` in a power language.
pub fn gamma_name(index: usize) -> String {
    format!("gamma_{index}")
}

pub fn gamma_columns(k: usize, domain: DomainSpec, budgets: &Budgets) -> Result<Vec<GammaColumn>> {
    let rows = domain.power_count(k);
    budgets.check_items(
        &format!("γ columns of width {k}"),
        rows.saturating_mul(k as u128),
        budgets.max_tuples,
        4,
    )?;
    let rows = rows as u64;
    let size = domain.size() as u64;
    Ok((1..=k)
        .map(|i| {
            let shift = saturating_pow(size as u128, (k - i) as u128) as u64;
            GammaColumn {
                index: i,
                values: (0..rows).map(|j| ((j / shift) % size) as Element).collect(),
            }
        })
        .collect())
}

/// The domain `A^k`, guarded by the power-domain budget.
pub fn power_domain(domain: DomainSpec, k: usize, budgets: &Budgets) -> Result<DomainSpec> {
    let size = domain.power_count(k);
    budgets.check_items(
        &format!("power domain {}^{k}", domain.size()),
        size,
        budgets.max_power_domain.min(u32::MAX as u128),
        1,
    )?;
    DomainSpec::new(size as u32)
}

/// `R^k` over `A^k`: a tuple belongs iff every coordinate slice lies in `R`.
pub fn power_relation(relation: &Relation, k: usize, budgets: &Budgets) -> Result<Relation> {
    let base = relation.domain();
    let domain = power_domain(base, k, budgets)?;
    let count = saturating_pow(relation.len() as u128, k as u128);
    budgets.check_items(
        &format!("tuples of {}^{k}", relation.name()),
        count,
        budgets.max_tuples,
        4 * relation.arity().max(1) as u128,
    )?;
    let rows: Vec<&ValueTuple> = relation.tuples().iter().collect();
    let s = relation.arity();
    let mut tuples = Vec::with_capacity(count as usize);
    if !rows.is_empty() {
        // choice[i] picks the tuple of R used as slice i
        let mut choice = vec![0 as Element; k];
        let mut column = vec![0 as Element; k];
        loop {
            let tuple: ValueTuple = (0..s)
                .map(|j| {
                    for (i, &c) in choice.iter().enumerate() {
                        column[i] = rows[c as usize][j];
                    }
                    base.rank(&column) as Element
                })
                .collect();
            tuples.push(tuple);
            if !crate::model::next_tuple(&mut choice, rows.len() as u32) {
                break;
            }
        }
    }
    Relation::new(relation.name(), s, domain, tuples)
}

/// Width of the power used for universal elimination: `|A|^|A|`.
pub fn power_width(domain: DomainSpec) -> Result<usize> {
    let width = domain.power_count(domain.size() as usize);
    usize::try_from(width)
        .ok()
        .filter(|&w| w <= 64)
        .ok_or_else(|| {
            Error::Budget(crate::error::BudgetExceeded {
                what: format!("power width {0}^{0}", domain.size()),
                required: width,
                limit: 64,
            })
        })
}

/// `Γ^{|A|^|A|} ∪ {γ_1, .., γ_|A|}`: every relation keeps its name, and the
/// γ columns become unary singletons `gamma_i`.
pub fn power_language(lang: &ConstraintLanguage, budgets: &Budgets) -> Result<ConstraintLanguage> {
    let base = lang.domain();
    let k = base.size() as usize;
    let width = power_width(base)?;
    let domain = power_domain(base, width, budgets)?;
    let mut out = ConstraintLanguage::new(domain);
    for r in lang.relations() {
        out.add(power_relation(r, width, budgets)?)?;
    }
    for column in gamma_columns(k, base, budgets)? {
        let name = gamma_name(column.index);
        if out.get(&name).is_some() {
            return Err(Error::Model(format!(
                "relation name `{name}` is reserved for γ columns in the power language"
            )));
        }
        out.add(Relation::singleton(name, domain, base.rank(&column.values) as Element)?)?;
    }
    Ok(out)
}

/// Translates `∀x_1..x_|A| ∃ȳ Φ` into the power CSP: relations become their
/// powers and each `x_i` gets the constraint `γ_i(x_i)`.
///
/// A Π₂ sentence with fewer than |A| universals is padded with unconstrained
/// dummy universals `x$dN` first.
pub fn qcsp_to_power_csp(s: &QuantifiedSentence, budgets: &Budgets) -> Result<CspInstance> {
    let language = Arc::new(power_language(s.language(), budgets)?);
    qcsp_to_power_csp_in(s, language)
}

/// As [`qcsp_to_power_csp`], reusing an already built power language.
pub fn qcsp_to_power_csp_in(s: &QuantifiedSentence, power: Arc<ConstraintLanguage>) -> Result<CspInstance> {
    let size = s.language().domain().size() as usize;
    if !s.is_pi2() {
        return Err(Error::InvalidArgument(
            "the power translation needs a ∀*∃* sentence".into(),
        ));
    }
    let k = s.universal_count();
    if k > size {
        return Err(Error::InvalidArgument(format!(
            "the power translation needs at most {size} universals, found {k}"
        )));
    }
    let mut names = Names::for_sentence(s);
    let mut universals: Vec<String> = s.prefix()[..k].iter().map(|q| q.var.clone()).collect();
    for d in 1..=size - k {
        universals.push(names.fresh("x", &format!("d{d}")));
    }
    let mut variables = universals.clone();
    variables.extend(s.prefix()[k..].iter().map(|q| q.var.clone()));
    let mut atoms = s.matrix().to_vec();
    for (i, x) in universals.iter().enumerate() {
        atoms.push(Atom::new(gamma_name(i + 1), [x.clone()]));
    }
    CspInstance::new(power, variables, atoms)
}

/// Result of translating a power CSP instance back into a sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodedSentence {
    Sentence(QuantifiedSentence),
    /// Some variable carries two different γ constraints, so the instance is unsatisfiable.
    False { variable: String },
}

/// Translates a power CSP instance back into `∀x_1..x_|A| ∃rest Φ` over `base`.
///
/// Variables constrained by `γ_i` are renamed to the new universal `x_i` and
/// the γ atoms dropped; every other variable becomes existential.
pub fn power_csp_to_qcsp(
    j: &CspInstance,
    base: &Arc<ConstraintLanguage>,
    budgets: &Budgets,
) -> Result<DecodedSentence> {
    let size = base.domain().size() as usize;
    let expected = power_language(base, budgets)?;
    if j.language().domain() != expected.domain() {
        return Err(Error::DomainMismatch(format!(
            "instance domain has {} elements, the power of the base domain has {}",
            j.language().domain().size(),
            expected.domain().size()
        )));
    }
    let gamma_index: BTreeMap<String, usize> = (1..=size).map(|i| (gamma_name(i), i)).collect();
    let mut checked = BTreeSet::new();
    let mut gammas: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for atom in j.atoms() {
        let rel = &atom.relation;
        if checked.insert(rel.as_str()) {
            let given = j.language().get(rel);
            if given.is_none() || given != expected.get(rel) {
                return Err(Error::Model(format!(
                    "relation `{rel}` is not part of the power language of the base language"
                )));
            }
        }
        if let Some(&i) = gamma_index.get(rel) {
            gammas.entry(atom.args[0].as_str()).or_default().insert(i);
        }
    }
    if let Some((var, _)) = gammas.iter().find(|(_, set)| set.len() > 1) {
        return Ok(DecodedSentence::False {
            variable: var.to_string(),
        });
    }

    let mut names = Names::for_vars(j.variables().iter().map(String::as_str));
    let x: Vec<String> = (1..=size).map(|i| names.fresh("x", &i.to_string())).collect();
    let rename = |v: &str| match gammas.get(v) {
        Some(set) => x[*set.iter().next().expect("nonempty") - 1].clone(),
        None => v.to_string(),
    };
    let mut prefix: Vec<QuantifiedVar> = x.iter().cloned().map(QuantifiedVar::forall).collect();
    prefix.extend(
        j.variables()
            .iter()
            .filter(|v| !gammas.contains_key(v.as_str()))
            .cloned()
            .map(QuantifiedVar::exists),
    );
    let matrix = j
        .atoms()
        .iter()
        .filter(|a| !gamma_index.contains_key(&a.relation))
        .map(|a| a.renamed(rename))
        .collect();
    Ok(DecodedSentence::Sentence(QuantifiedSentence::new(base.clone(), prefix, matrix)?))
}

impl DecodedSentence {
    pub fn sentence(&self) -> Option<&QuantifiedSentence> {
        match self {
            DecodedSentence::Sentence(s) => Some(s),
            DecodedSentence::False { .. } => None,
        }
    }

    pub fn is_false(&self) -> bool {
        matches!(self, DecodedSentence::False { .. })
    }
}

/// Whether `s` has the exact shape the power translation expects after padding.
pub fn fits_power_translation(s: &QuantifiedSentence) -> bool {
    s.is_pi2() && s.universal_count() <= s.language().domain().size() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_language, parse_sentence};

    fn d(n: u32) -> DomainSpec {
        DomainSpec::new(n).unwrap()
    }

    fn xor_lang() -> Arc<ConstraintLanguage> {
        Arc::new(
            parse_language(
                "domain 2\nrelation XOR0 3\n0 0 0\n0 1 1\n1 0 1\n1 1 0\nend\nrelation NOT 2\n0 1\n1 0\nend\n",
            )
            .unwrap(),
        )
    }

    fn values(columns: &[GammaColumn]) -> Vec<Vec<Element>> {
        columns.iter().map(|c| c.values.clone()).collect()
    }

    #[test]
    fn gamma_examples() {
        let b = Budgets::default();
        assert_eq!(values(&gamma_columns(2, d(2), &b).unwrap()), vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]]);
        assert_eq!(values(&gamma_columns(1, d(4), &b).unwrap()), vec![vec![0, 1, 2, 3]]);
        assert_eq!(
            values(&gamma_columns(2, d(3), &b).unwrap()),
            vec![vec![0, 0, 0, 1, 1, 1, 2, 2, 2], vec![0, 1, 2, 0, 1, 2, 0, 1, 2]]
        );
    }

    #[test]
    fn not_squared() {
        let lang = xor_lang();
        let p = power_relation(lang.get("NOT").unwrap(), 2, &Budgets::default()).unwrap();
        assert_eq!(p.domain().size(), 4);
        assert_eq!(p.len(), 4);
        let rank = |a: u32, b: u32| d(2).rank(&[a, b]) as Element;
        for a in 0..4u32 {
            for b in 0..4u32 {
                let (a1, a2, b1, b2) = (a / 2, a % 2, b / 2, b % 2);
                assert_eq!(p.contains(&[a, b]), a1 != b1 && a2 != b2);
            }
        }
        assert!(p.contains(&[rank(0, 1), rank(1, 0)]));
    }

    #[test]
    fn power_cardinalities() {
        let lang = xor_lang();
        let p = power_relation(lang.get("XOR0").unwrap(), 4, &Budgets::default()).unwrap();
        assert_eq!((p.len(), p.domain().size()), (256, 16));
        let empty = Relation::new("E", 2, d(2), Vec::<ValueTuple>::new()).unwrap();
        assert!(power_relation(&empty, 3, &Budgets::default()).unwrap().is_empty());
    }

    #[test]
    fn three_element_power_is_refused() {
        let lang = parse_language("domain 3\nrelation R 1\n0\nend\n").unwrap();
        let err = power_language(&lang, &Budgets::default()).unwrap_err();
        assert!(matches!(err, Error::Budget(b) if b.required == 7_625_597_484_987));
    }

    #[test]
    fn forward_and_back() {
        let lang = xor_lang();
        let s = parse_sentence("forall x1\nforall x2\nexists y\nconstraint XOR0 x1 x2 y\n", lang.clone()).unwrap();
        let j = qcsp_to_power_csp(&s, &Budgets::default()).unwrap();
        assert_eq!(j.language().domain().size(), 16);
        assert_eq!(
            j.atoms(),
            &[
                Atom::new("XOR0", ["x1", "x2", "y"]),
                Atom::new("gamma_1", ["x1"]),
                Atom::new("gamma_2", ["x2"]),
            ]
        );
        let back = power_csp_to_qcsp(&j, &lang, &Budgets::default()).unwrap();
        let back = back.sentence().unwrap();
        assert_eq!(back.to_string(), "∀x$1 ∀x$2 ∃y XOR0(x$1,x$2,y)");
    }

    #[test]
    fn padding_adds_dummy_universal() {
        let lang = xor_lang();
        let s = parse_sentence("forall x\nexists y\nconstraint NOT x y\n", lang).unwrap();
        let j = qcsp_to_power_csp(&s, &Budgets::default()).unwrap();
        assert_eq!(j.variables(), &["x", "x$d1", "y"]);
        assert_eq!(j.atoms().last().unwrap(), &Atom::new("gamma_2", ["x$d1"]));
    }

    #[test]
    fn conflicting_gammas_decode_to_false() {
        let lang = xor_lang();
        let power = Arc::new(power_language(&lang, &Budgets::default()).unwrap());
        let j = CspInstance::new(
            power,
            vec!["z".into()],
            vec![Atom::new("gamma_1", ["z"]), Atom::new("gamma_2", ["z"])],
        )
        .unwrap();
        assert_eq!(
            power_csp_to_qcsp(&j, &lang, &Budgets::default()).unwrap(),
            DecodedSentence::False { variable: "z".into() }
        );
    }

    #[test]
    fn foreign_relation_is_rejected() {
        let lang = xor_lang();
        let other = Arc::new(parse_language("domain 16\nrelation XOR0 1\n0\nend\n").unwrap());
        let j = CspInstance::new(other, vec!["v".into()], vec![Atom::new("XOR0", ["v"])]).unwrap();
        assert!(power_csp_to_qcsp(&j, &lang, &Budgets::default()).is_err());
    }
}
