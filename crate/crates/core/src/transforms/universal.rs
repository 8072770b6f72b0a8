//! Universal quantifier removal, movement to the front, and count reduction.

use std::collections::HashMap;
use std::sync::Arc;

use crate::budget::{saturating_pow, Budgets};
use crate::error::{Error, Result};
use crate::model::{constant_name, Atom, CspInstance, QuantifiedSentence, QuantifiedVar, Quantifier};
use crate::transforms::naming::{tag, Names};

fn rename_atoms<'a>(atoms: &'a [Atom], map: &HashMap<String, String>) -> impl Iterator<Item = Atom> + 'a {
    let map = map.clone();
    atoms
        .iter()
        .map(move |a| a.renamed(|v| map.get(v).cloned().unwrap_or_else(|| v.to_string())))
}

fn check_atoms(budgets: &Budgets, what: &str, atoms: u128, max_arity: usize) -> Result<()> {
    budgets.check_items(what, atoms, budgets.max_atoms, 24 * (max_arity as u128 + 1))?;
    Ok(())
}

fn max_arity(s: &QuantifiedSentence) -> usize {
    s.matrix().iter().map(|a| a.args.len()).max().unwrap_or(0)
}

/// Removes every universal quantifier, innermost first, yielding a CSP instance over Γ*.
///
/// `∃ȳ ∀x Φ` becomes `∃ȳ ∃x$1..x$s ⋀_i (Φ_i ∧ const_{a_i}(x$i))`, where `Φ_i`
/// renames `x` to `x$i` and every variable bound after `x` to a per-copy name.
pub fn eliminate_universals(s: &QuantifiedSentence, budgets: &Budgets) -> Result<CspInstance> {
    let domain = s.language().domain();
    let universals = s.universal_count();
    let copies = saturating_pow(domain.size() as u128, universals as u128);
    budgets.check_items("universal removal copies", copies, budgets.max_copies, 1)?;
    check_atoms(
        budgets,
        "universal removal atoms",
        copies.saturating_mul(s.matrix().len() as u128 + universals as u128),
        max_arity(s),
    )?;

    let language = Arc::new(s.language().with_constants()?);
    let mut names = Names::for_sentence(s);
    let mut prefix: Vec<QuantifiedVar> = s.prefix().to_vec();
    let mut matrix: Vec<Atom> = s.matrix().to_vec();

    while let Some(p) = prefix.iter().rposition(|q| q.quantifier == Quantifier::Forall) {
        let x = prefix[p].var.clone();
        let later: Vec<String> = prefix[p + 1..].iter().map(|q| q.var.clone()).collect();
        let mut new_prefix = prefix[..p].to_vec();
        let mut new_matrix = Vec::with_capacity(matrix.len() * domain.size() as usize + domain.size() as usize);
        for a in domain.elements() {
            let i = (a + 1).to_string();
            let mut map = HashMap::new();
            let xi = names.fresh(&x, &i);
            map.insert(x.clone(), xi.clone());
            new_prefix.push(QuantifiedVar::exists(xi.clone()));
            for v in &later {
                let vi = names.fresh(v, &i);
                map.insert(v.clone(), vi.clone());
                new_prefix.push(QuantifiedVar::exists(vi));
            }
            new_matrix.extend(rename_atoms(&matrix, &map));
            new_matrix.push(Atom::new(constant_name(a), [xi]));
        }
        prefix = new_prefix;
        matrix = new_matrix;
    }

    CspInstance::from_sentence(QuantifiedSentence::new_unchecked(language, prefix, matrix))
}

/// Rewrites the sentence into ∀*∃* form, moving universals left one at a time from the right.
///
/// `∃ȳ ∀x Φ` becomes `∀x$1..x$s ∃ȳ ⋀_i Φ_i`, where `Φ_i` renames `x` and the
/// existentials bound inside `Φ` apart per copy. Universals inside `Φ` are
/// shared by the copies, since `∀w` distributes over the conjunction.
pub fn move_universals_left(s: &QuantifiedSentence, budgets: &Budgets) -> Result<QuantifiedSentence> {
    let size = s.language().domain().size() as usize;
    let mut names = Names::for_sentence(s);
    let mut prefix: Vec<QuantifiedVar> = s.prefix().to_vec();
    let mut matrix: Vec<Atom> = s.matrix().to_vec();
    let width = max_arity(s);

    // the last ∃ that is directly followed by a ∀
    while let Some(p) = (0..prefix.len().saturating_sub(1))
        .rev()
        .find(|&i| prefix[i].quantifier == Quantifier::Exists && prefix[i + 1].quantifier == Quantifier::Forall)
    {
        let q = prefix[..=p]
            .iter()
            .rposition(|v| v.quantifier == Quantifier::Forall)
            .map_or(0, |i| i + 1);
        let x = prefix[p + 1].var.clone();
        let inner = &prefix[p + 2..];
        let (inner_forall, inner_exists): (Vec<&QuantifiedVar>, Vec<&QuantifiedVar>) =
            inner.iter().partition(|v| v.quantifier == Quantifier::Forall);

        check_atoms(
            budgets,
            "moving universals left",
            (matrix.len() as u128).saturating_mul(size as u128),
            width,
        )?;
        budgets.check_items(
            "moving universals left (variables)",
            (prefix.len() as u128).saturating_mul(size as u128),
            budgets.max_atoms,
            32,
        )?;

        let mut moved = Vec::with_capacity(size);
        let mut copies_exists = Vec::new();
        let mut new_matrix = Vec::with_capacity(matrix.len() * size);
        for i in 1..=size {
            let i = i.to_string();
            let mut map = HashMap::new();
            let xi = names.fresh(&x, &i);
            map.insert(x.clone(), xi.clone());
            moved.push(QuantifiedVar::forall(xi));
            for v in &inner_exists {
                let vi = names.fresh(&v.var, &i);
                map.insert(v.var.clone(), vi.clone());
                copies_exists.push(QuantifiedVar::exists(vi));
            }
            new_matrix.extend(rename_atoms(&matrix, &map));
        }

        let mut new_prefix = prefix[..q].to_vec();
        new_prefix.extend(moved);
        new_prefix.extend_from_slice(&prefix[q..=p]);
        new_prefix.extend(inner_forall.into_iter().cloned());
        new_prefix.extend(copies_exists);
        prefix = new_prefix;
        matrix = new_matrix;
    }
    Ok(QuantifiedSentence::new_unchecked(s.language().clone(), prefix, matrix))
}

/// Replaces the `k` universals of a Π₂ sentence by `∀z$1..z$s` (`s = |A|`).
///
/// The result is the prenexed conjunction over all maps `φ: [k] -> [s]` of
/// copies with `x_i ↦ z_{φ(i)}` and fresh existentials per copy.
pub fn reduce_universal_count(s: &QuantifiedSentence, budgets: &Budgets) -> Result<QuantifiedSentence> {
    if !s.is_pi2() {
        return Err(Error::InvalidArgument("universal-count reduction needs a ∀*∃* sentence".into()));
    }
    let size = s.language().domain().size();
    let k = s.universal_count();
    let copies = saturating_pow(size as u128, k as u128);
    budgets.check_items("universal-count reduction copies", copies, budgets.max_copies, 1)?;
    check_atoms(
        budgets,
        "universal-count reduction atoms",
        copies.saturating_mul(s.matrix().len() as u128),
        max_arity(s),
    )?;

    let universals: Vec<&str> = s.prefix()[..k].iter().map(|q| q.var.as_str()).collect();
    let existentials: Vec<&str> = s.prefix()[k..].iter().map(|q| q.var.as_str()).collect();
    let mut names = Names::for_sentence(s);
    let z: Vec<String> = (1..=size).map(|j| names.fresh("z", &j.to_string())).collect();

    let mut prefix: Vec<QuantifiedVar> = z.iter().cloned().map(QuantifiedVar::forall).collect();
    let mut matrix = Vec::with_capacity(copies as usize * s.matrix().len());
    let mut phi = vec![0u32; k];
    loop {
        let mut map = HashMap::new();
        for (x, &j) in universals.iter().zip(&phi) {
            map.insert(x.to_string(), z[j as usize].clone());
        }
        let copy_tag = tag(&phi.iter().map(|j| j + 1).collect::<Vec<_>>());
        for y in &existentials {
            let name = if k == 0 { y.to_string() } else { names.fresh(y, &copy_tag) };
            map.insert(y.to_string(), name.clone());
            prefix.push(QuantifiedVar::exists(name));
        }
        matrix.extend(rename_atoms(s.matrix(), &map));
        if !crate::model::next_tuple(&mut phi, size) {
            break;
        }
    }
    Ok(QuantifiedSentence::new_unchecked(s.language().clone(), prefix, matrix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_language, parse_sentence};
    use crate::model::ConstraintLanguage;

    fn not_lang() -> Arc<ConstraintLanguage> {
        Arc::new(parse_language("domain 2\nrelation NOT 2\n0 1\n1 0\nend\n").unwrap())
    }

    fn sentence(text: &str) -> QuantifiedSentence {
        parse_sentence(text, not_lang()).unwrap()
    }

    #[test]
    fn eliminate_forall_exists_not() {
        let inst = eliminate_universals(&sentence("forall x\nexists y\nconstraint NOT x y\n"), &Budgets::default()).unwrap();
        assert_eq!(inst.variables(), &["x$1", "y$1", "x$2", "y$2"]);
        assert_eq!(
            inst.atoms(),
            &[
                Atom::new("NOT", ["x$1", "y$1"]),
                Atom::new("const_0", ["x$1"]),
                Atom::new("NOT", ["x$2", "y$2"]),
                Atom::new("const_1", ["x$2"]),
            ]
        );
        assert!(inst.language().get("const_1").is_some());
        assert!(inst.to_sentence().validate().is_empty());
    }

    #[test]
    fn eliminate_without_universals_keeps_matrix() {
        let s = sentence("exists a\nexists b\nconstraint NOT a b\n");
        let inst = eliminate_universals(&s, &Budgets::default()).unwrap();
        assert_eq!(inst.atoms(), s.matrix());
        assert_eq!(inst.language().len(), 3);
    }

    #[test]
    fn eliminate_two_universals_makes_four_copies() {
        let s = sentence("forall a\nexists b\nforall c\nconstraint NOT a b\nconstraint NOT b c\n");
        let inst = eliminate_universals(&s, &Budgets::default()).unwrap();
        let not_atoms = inst.atoms().iter().filter(|a| a.relation == "NOT").count();
        assert_eq!(not_atoms, 2 * 4);
        let budgets = Budgets {
            max_copies: 2,
            ..Budgets::default()
        };
        assert!(matches!(eliminate_universals(&s, &budgets), Err(Error::Budget(_))));
    }

    #[test]
    fn move_left_single_step() {
        let s = sentence("exists y\nforall x\nconstraint NOT x y\n");
        let out = move_universals_left(&s, &Budgets::default()).unwrap();
        assert_eq!(
            out.prefix(),
            &[QuantifiedVar::forall("x$1"), QuantifiedVar::forall("x$2"), QuantifiedVar::exists("y")]
        );
        assert_eq!(out.matrix(), &[Atom::new("NOT", ["x$1", "y"]), Atom::new("NOT", ["x$2", "y"])]);
    }

    #[test]
    fn move_left_leaves_pi2_alone() {
        let s = sentence("forall x\nexists y\nconstraint NOT x y\n");
        assert_eq!(move_universals_left(&s, &Budgets::default()).unwrap(), s);
    }

    #[test]
    fn move_left_reaches_pi2() {
        let s = sentence("exists a\nforall b\nexists c\nforall d\nconstraint NOT a b\nconstraint NOT c d\n");
        let out = move_universals_left(&s, &Budgets::default()).unwrap();
        assert!(out.is_pi2());
        assert!(out.validate().is_empty());
    }

    #[test]
    fn count_reduction_copies() {
        let s = sentence("forall a\nforall b\nforall c\nexists d\nconstraint NOT a d\nconstraint NOT b c\n");
        let out = reduce_universal_count(&s, &Budgets::default()).unwrap();
        assert_eq!(out.universal_count(), 2);
        assert_eq!(out.existential_count(), 8);
        assert_eq!(out.matrix().len(), 16);
        assert!(out.validate().is_empty());

        let s = sentence("forall a\nexists d\nconstraint NOT a d\n");
        let out = reduce_universal_count(&s, &Budgets::default()).unwrap();
        assert_eq!(out.matrix(), &[Atom::new("NOT", ["z$1", "d$1"]), Atom::new("NOT", ["z$2", "d$2"])]);
    }

    #[test]
    fn count_reduction_needs_pi2() {
        let s = sentence("exists y\nforall x\nconstraint NOT x y\n");
        assert!(reduce_universal_count(&s, &Budgets::default()).is_err());
    }
}
