use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{next_tuple, DomainSpec, Element};

/// A total operation `A^m -> A`, stored in lexicographic argument order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperationTable {
    arity: usize,
    domain: DomainSpec,
    table: Vec<Element>,
}

impl OperationTable {
    pub fn new(domain: DomainSpec, arity: usize, table: Vec<Element>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArgument("operations must have arity at least 1".into()));
        }
        let expected = domain.power_count(arity);
        if table.len() as u128 != expected {
            return Err(Error::InvalidArgument(format!(
                "table of an arity-{arity} operation over a domain of size {} needs {expected} entries, got {}",
                domain.size(),
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&v| !domain.contains(v)) {
            return Err(Error::InvalidArgument(format!("table entry {bad} outside the domain")));
        }
        Ok(Self { arity, domain, table })
    }

    /// Tabulates `f` over A^m.
    pub fn from_fn(domain: DomainSpec, arity: usize, mut f: impl FnMut(&[Element]) -> Element) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArgument("operations must have arity at least 1".into()));
        }
        let mut table = Vec::with_capacity(domain.power_count(arity) as usize);
        let mut args = vec![0; arity];
        loop {
            table.push(f(&args));
            if !next_tuple(&mut args, domain.size()) {
                break;
            }
        }
        Self::new(domain, arity, table)
    }

    /// The `index`-th (0-based) projection of arity `arity`.
    pub fn projection(domain: DomainSpec, arity: usize, index: usize) -> Result<Self> {
        if index >= arity {
            return Err(Error::InvalidArgument(format!("projection {index} of arity {arity}")));
        }
        Self::from_fn(domain, arity, |args| args[index])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn table(&self) -> &[Element] {
        &self.table
    }

    pub fn apply(&self, args: &[Element]) -> Element {
        debug_assert_eq!(args.len(), self.arity);
        self.table[self.domain.rank(args) as usize]
    }

    /// Coordinatewise application to `arity` tuples of equal length.
    pub fn apply_columns(&self, rows: &[&[Element]], out: &mut Vec<Element>) {
        out.clear();
        let len = rows.first().map_or(0, |r| r.len());
        let size = self.domain.size() as u64;
        for i in 0..len {
            let idx = rows.iter().fold(0u64, |acc, r| acc * size + r[i] as u64);
            out.push(self.table[idx as usize]);
        }
    }

    /// f(x, .., x) = x for every x.
    pub fn is_idempotent(&self) -> bool {
        self.domain.elements().all(|x| self.apply(&vec![x; self.arity]) == x)
    }

    /// The operation applied coordinatewise on A^k, over the power domain of lexicographic ranks.
    pub fn lift(&self, k: usize, power_domain: DomainSpec) -> Result<Self> {
        if power_domain.power_count(1) != self.domain.power_count(k) {
            return Err(Error::DomainMismatch(format!(
                "power domain of size {} is not A^{k} for |A| = {}",
                power_domain.size(),
                self.domain.size()
            )));
        }
        let base = self.domain;
        let decoded: Vec<Vec<Element>> = power_domain
            .elements()
            .map(|e| base.unrank(e as u64, k))
            .collect();
        let mut scratch = Vec::with_capacity(k);
        Self::from_fn(power_domain, self.arity, |args| {
            let rows: Vec<&[Element]> = args.iter().map(|&a| decoded[a as usize].as_slice()).collect();
            self.apply_columns(&rows, &mut scratch);
            base.rank(&scratch) as Element
        })
    }
}

impl Serialize for OperationTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("OperationTable", 3)?;
        st.serialize_field("arity", &self.arity)?;
        st.serialize_field("domain", &self.domain.size())?;
        st.serialize_field("table", &self.table)?;
        st.end()
    }
}
