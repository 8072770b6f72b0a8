use serde::Serialize;

use crate::algebra::polymorphism::preserves_indexed;
use crate::algebra::{Execution, OperationTable};
use crate::budget::{saturating_pow, Budgets};
use crate::error::{Error, Result};
use crate::model::{ConstraintLanguage, DomainSpec, Element, Relation, TupleIndex};

/// Weak near-unanimity: idempotent and `f(y,x,..,x) = f(x,y,x,..,x) = .. = f(x,..,x,y)`.
pub fn is_wnu(f: &OperationTable) -> Result<bool> {
    let m = f.arity();
    if m < 2 {
        return Err(Error::InvalidArgument(format!("WNU identities need arity >= 2, got {m}")));
    }
    if !f.is_idempotent() {
        return Ok(false);
    }
    let d = f.domain();
    let mut args = vec![0; m];
    for x in d.elements() {
        for y in d.elements().filter(|&y| y != x) {
            let mut value = None;
            for pos in 0..m {
                args.fill(x);
                args[pos] = y;
                let v = f.apply(&args);
                match value {
                    None => value = Some(v),
                    Some(prev) if prev != v => return Ok(false),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WnuSearch {
    pub arity: usize,
    pub table: Option<OperationTable>,
    /// Tables satisfying the WNU identities that were tested for preservation.
    pub candidates_examined: u128,
    /// Size of the unpruned table space |A|^(|A|^m).
    pub search_space: u128,
}

/// Some arity-`m` WNU polymorphism of `lang`, or `None` when no table at this arity qualifies.
pub fn find_wnu(lang: &ConstraintLanguage, m: usize, budgets: &Budgets) -> Result<Option<OperationTable>> {
    Ok(search_wnu(lang, m, budgets)?.table)
}

/// Exhaustive WNU search reporting how much of the space was examined.
///
/// Only tables that are idempotent and constant on every one-off orbit are
/// generated; each is then tested against every relation.
pub fn search_wnu(lang: &ConstraintLanguage, m: usize, budgets: &Budgets) -> Result<WnuSearch> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("WNU identities need arity >= 2, got {m}")));
    }
    let domain = lang.domain();
    let entries = domain.power_count(m);
    budgets.check_items(
        &format!("arity-{m} operation table on {} elements", domain.size()),
        entries,
        budgets.max_tuples,
        4,
    )?;
    let classes = OrbitClasses::new(domain, m);
    let candidates = saturating_pow(domain.size() as u128, classes.free.len() as u128);
    budgets.check(
        &format!("arity-{m} WNU candidates on {} elements", domain.size()),
        candidates,
        budgets.max_tables,
    )?;
    let search_space = saturating_pow(domain.size() as u128, entries);

    let indexed: Vec<(&Relation, TupleIndex)> = lang.relations().map(|r| (r, TupleIndex::build(r))).collect();
    let mut values = vec![0 as Element; classes.free.len()];
    let mut examined: u128 = 0;
    loop {
        examined += 1;
        let f = classes.table(domain, m, &values);
        if indexed
            .iter()
            .all(|(r, idx)| preserves_indexed(&f, r, idx, Execution::Parallel))
        {
            return Ok(WnuSearch {
                arity: m,
                table: Some(f),
                candidates_examined: examined,
                search_space,
            });
        }
        if !crate::model::next_tuple(&mut values, domain.size()) {
            break;
        }
    }
    Ok(WnuSearch {
        arity: m,
        table: None,
        candidates_examined: examined,
        search_space,
    })
}

/// Partition of table positions forced by idempotence and the WNU identities.
struct OrbitClasses {
    /// Class of every table position; `Fixed(x)` for diagonal positions.
    class_of: Vec<Slot>,
    /// Representative position of each free class.
    free: Vec<usize>,
}

#[derive(Clone, Copy)]
enum Slot {
    Fixed(Element),
    Free(usize),
}

impl OrbitClasses {
    fn new(domain: DomainSpec, m: usize) -> Self {
        let entries = domain.power_count(m) as usize;
        let mut parent: Vec<usize> = (0..entries).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut args = vec![0; m];
        for x in domain.elements() {
            for y in domain.elements().filter(|&y| y != x) {
                let mut first = None;
                for pos in 0..m {
                    args.fill(x);
                    args[pos] = y;
                    let idx = domain.rank(&args) as usize;
                    match first {
                        None => first = Some(idx),
                        Some(f) => {
                            let (a, b) = (find(&mut parent, f), find(&mut parent, idx));
                            if a != b {
                                parent[a.max(b)] = a.min(b);
                            }
                        }
                    }
                }
            }
        }
        let mut class_of = Vec::with_capacity(entries);
        let mut free = Vec::new();
        let mut root_class = vec![usize::MAX; entries];
        let size = domain.size() as u64;
        let diagonal_step: u64 = (0..m).fold(0, |acc, _| acc * size + 1);
        for idx in 0..entries {
            if diagonal_step > 0 && (idx as u64).is_multiple_of(diagonal_step) && (idx as u64 / diagonal_step) < size {
                class_of.push(Slot::Fixed((idx as u64 / diagonal_step) as Element));
                continue;
            }
            let root = find(&mut parent, idx);
            if root_class[root] == usize::MAX {
                root_class[root] = free.len();
                free.push(root);
            }
            class_of.push(Slot::Free(root_class[root]));
        }
        Self { class_of, free }
    }

    fn table(&self, domain: DomainSpec, m: usize, values: &[Element]) -> OperationTable {
        let table = self
            .class_of
            .iter()
            .map(|slot| match *slot {
                Slot::Fixed(x) => x,
                Slot::Free(c) => values[c],
            })
            .collect();
        OperationTable::new(domain, m, table).expect("well-formed table")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d2() -> DomainSpec {
        DomainSpec::new(2).unwrap()
    }

    fn minority() -> OperationTable {
        OperationTable::from_fn(d2(), 3, |a| (a[0] + a[1] + a[2]) % 2).unwrap()
    }

    fn lang_of(rel: Relation) -> ConstraintLanguage {
        ConstraintLanguage::with_relations(rel.domain(), [rel]).unwrap()
    }

    #[test]
    fn wnu_examples() {
        assert!(is_wnu(&minority()).unwrap());
        let max = OperationTable::from_fn(d2(), 2, |a| a[0].max(a[1])).unwrap();
        assert!(is_wnu(&max).unwrap());
        let p = OperationTable::projection(d2(), 3, 0).unwrap();
        assert!(!is_wnu(&p).unwrap());
        let unary = OperationTable::projection(d2(), 1, 0).unwrap();
        assert!(is_wnu(&unary).is_err());
    }

    #[test]
    fn affine_has_minority_wnu() {
        let xor0 = Relation::new("XOR0", 3, d2(), [vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap();
        let found = find_wnu(&lang_of(xor0), 3, &Budgets::default()).unwrap();
        assert_eq!(found, Some(minority()));
    }

    #[test]
    fn one_in_three_has_no_ternary_wnu() {
        let r = Relation::new("ONE-IN-THREE", 3, d2(), [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]).unwrap();
        let search = search_wnu(&lang_of(r), 3, &Budgets::default()).unwrap();
        assert_eq!(search.table, None);
        assert_eq!(search.search_space, 256);
        // two one-off orbits, nothing else free
        assert_eq!(search.candidates_examined, 4);
    }

    #[test]
    fn empty_language_has_binary_wnu() {
        let f = find_wnu(&ConstraintLanguage::new(d2()), 2, &Budgets::default())
            .unwrap()
            .unwrap();
        assert!(is_wnu(&f).unwrap());
    }

    #[test]
    fn orbit_candidates_are_exactly_the_wnus() {
        // every generated candidate is a WNU and their number matches brute force
        for (size, m) in [(2u32, 2usize), (2, 3), (3, 2)] {
            let d = DomainSpec::new(size).unwrap();
            let classes = OrbitClasses::new(d, m);
            let mut values = vec![0; classes.free.len()];
            let mut generated = 0u64;
            loop {
                assert!(is_wnu(&classes.table(d, m, &values)).unwrap());
                generated += 1;
                if !crate::model::next_tuple(&mut values, size) {
                    break;
                }
            }
            let entries = d.power_count(m) as usize;
            let mut brute = 0u64;
            let mut table = vec![0; entries];
            loop {
                if is_wnu(&OperationTable::new(d, m, table.clone()).unwrap()).unwrap() {
                    brute += 1;
                }
                if !crate::model::next_tuple(&mut table, size) {
                    break;
                }
            }
            assert_eq!(generated, brute, "size {size}, arity {m}");
        }
    }
}
