use rayon::prelude::*;

use crate::algebra::{Execution, OperationTable};
use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::model::{ConstraintLanguage, DomainSpec, Element, Relation, TupleIndex};

/// Tuple-choice count above which the parallel path splits work.
const PARALLEL_GRAIN: u128 = 1 << 14;

/// Whether `f` maps every choice of `arity(f)` tuples of `relation` (applied coordinatewise) back into it.
pub fn preserves(f: &OperationTable, relation: &Relation) -> Result<bool> {
    preserves_with(f, relation, Execution::Sequential)
}

pub fn preserves_with(f: &OperationTable, relation: &Relation, exec: Execution) -> Result<bool> {
    if f.domain() != relation.domain() {
        return Err(Error::DomainMismatch(format!(
            "operation over a domain of size {} tested against `{}` over size {}",
            f.domain().size(),
            relation.name(),
            relation.domain().size()
        )));
    }
    let index = TupleIndex::build(relation);
    Ok(preserves_indexed(f, relation, &index, exec))
}

pub(crate) fn preserves_indexed(f: &OperationTable, relation: &Relation, index: &TupleIndex, exec: Execution) -> bool {
    let rows: Vec<&[Element]> = relation.tuples().iter().map(|t| t.as_slice()).collect();
    if rows.is_empty() {
        return true;
    }
    let m = f.arity();
    let combos = crate::budget::saturating_pow(rows.len() as u128, m as u128);
    match exec {
        Execution::Parallel if combos >= PARALLEL_GRAIN && m > 1 => (0..rows.len())
            .into_par_iter()
            .all(|first| preserves_from(f, &rows, index, Some(first))),
        _ => preserves_from(f, &rows, index, None),
    }
}

/// Checks all row choices, optionally with the first row pinned.
fn preserves_from(f: &OperationTable, rows: &[&[Element]], index: &TupleIndex, first: Option<usize>) -> bool {
    let m = f.arity();
    let free_start = usize::from(first.is_some());
    let mut choice = vec![0usize; m];
    if let Some(i) = first {
        choice[0] = i;
    }
    let mut picked: Vec<&[Element]> = Vec::with_capacity(m);
    let mut image = Vec::new();
    loop {
        picked.clear();
        picked.extend(choice.iter().map(|&c| rows[c]));
        f.apply_columns(&picked, &mut image);
        if !index.contains(&image) {
            return false;
        }
        // odometer over the free positions
        let mut pos = m;
        loop {
            if pos == free_start {
                return true;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < rows.len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// All arity-`arity` operations preserving every relation of `lang`, in lexicographic table order.
pub fn polymorphisms(lang: &ConstraintLanguage, arity: usize, budgets: &Budgets) -> Result<Vec<OperationTable>> {
    polymorphisms_with(lang, arity, budgets, Execution::Sequential)
}

pub fn polymorphisms_with(
    lang: &ConstraintLanguage,
    arity: usize,
    budgets: &Budgets,
    exec: Execution,
) -> Result<Vec<OperationTable>> {
    if arity == 0 {
        return Err(Error::InvalidArgument("polymorphism arity must be at least 1".into()));
    }
    let domain = lang.domain();
    let entries = domain.power_count(arity);
    let count = crate::budget::saturating_pow(domain.size() as u128, entries);
    budgets.check_items(
        &format!("enumerating arity-{arity} operations on {} elements", domain.size()),
        count,
        budgets.max_tables,
        entries,
    )?;
    let indexed: Vec<(&Relation, TupleIndex)> = lang.relations().map(|r| (r, TupleIndex::build(r))).collect();
    let entries = entries as usize;
    let test = |code: u128| -> Option<OperationTable> {
        let table = decode_table(code, entries, domain);
        let f = OperationTable::new(domain, arity, table).expect("well-formed table");
        indexed
            .iter()
            .all(|(r, idx)| preserves_indexed(&f, r, idx, Execution::Sequential))
            .then_some(f)
    };
    let count = count as u64;
    let found = match exec {
        Execution::Parallel => (0..count).into_par_iter().filter_map(|c| test(c as u128)).collect(),
        Execution::Sequential => (0..count).filter_map(|c| test(c as u128)).collect(),
    };
    Ok(found)
}

/// The `code`-th table in lexicographic order (first entry most significant).
fn decode_table(mut code: u128, entries: usize, domain: DomainSpec) -> Vec<Element> {
    let base = domain.size() as u128;
    let mut table = vec![0; entries];
    for slot in table.iter_mut().rev() {
        *slot = (code % base) as Element;
        code /= base;
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d2() -> DomainSpec {
        DomainSpec::new(2).unwrap()
    }

    fn xor0() -> Relation {
        Relation::new("XOR0", 3, d2(), [vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap()
    }

    fn minority() -> OperationTable {
        OperationTable::from_fn(d2(), 3, |a| (a[0] + a[1] + a[2]) % 2).unwrap()
    }

    #[test]
    fn minority_preserves_affine() {
        assert!(preserves(&minority(), &xor0()).unwrap());
        assert!(preserves_with(&minority(), &xor0(), Execution::Parallel).unwrap());
    }

    #[test]
    fn constant_one_breaks_affine() {
        let one = OperationTable::from_fn(d2(), 1, |_| 1).unwrap();
        assert!(!preserves(&one, &xor0()).unwrap());
    }

    #[test]
    fn projection_preserves_anything() {
        let p = OperationTable::projection(d2(), 2, 0).unwrap();
        let r = Relation::new("R", 2, d2(), [vec![0, 1]]).unwrap();
        assert!(preserves(&p, &r).unwrap());
        assert!(preserves(&p, &xor0()).unwrap());
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        let d3 = DomainSpec::new(3).unwrap();
        let f = OperationTable::projection(d3, 1, 0).unwrap();
        assert!(preserves(&f, &xor0()).is_err());
    }

    #[test]
    fn unary_polymorphisms_of_affine() {
        let lang = ConstraintLanguage::with_relations(d2(), [xor0()]).unwrap();
        let pols = polymorphisms(&lang, 1, &Budgets::default()).unwrap();
        let tables: Vec<&[Element]> = pols.iter().map(|p| p.table()).collect();
        // constant 0 and identity
        assert_eq!(tables, vec![&[0, 0][..], &[0, 1][..]]);
    }

    #[test]
    fn empty_language_keeps_everything() {
        let lang = ConstraintLanguage::new(d2());
        assert_eq!(polymorphisms(&lang, 1, &Budgets::default()).unwrap().len(), 4);
    }

    #[test]
    fn ternary_polymorphisms_contain_minority() {
        let lang = ConstraintLanguage::with_relations(d2(), [xor0()]).unwrap();
        let pols = polymorphisms(&lang, 3, &Budgets::default()).unwrap();
        assert!(pols.contains(&minority()));
        let par = polymorphisms_with(&lang, 3, &Budgets::default(), Execution::Parallel).unwrap();
        assert_eq!(pols, par);
    }

    #[test]
    fn table_budget_enforced() {
        let lang = ConstraintLanguage::new(DomainSpec::new(3).unwrap());
        let budgets = Budgets {
            max_tables: 1000,
            ..Budgets::default()
        };
        let err = polymorphisms(&lang, 2, &budgets).unwrap_err();
        assert!(matches!(err, Error::Budget(b) if b.required == 19683));
    }
}
