use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::domain::{DomainSpec, Element, ValueTuple};

/// An extensional relation: a set of tuples of fixed arity over a domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    name: String,
    arity: usize,
    domain: DomainSpec,
    tuples: BTreeSet<ValueTuple>,
}

impl Relation {
    pub fn new<I>(name: impl Into<String>, arity: usize, domain: DomainSpec, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = ValueTuple>,
    {
        let name = name.into();
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::Model(format!(
                    "relation `{name}` has arity {arity} but contains a tuple of length {}",
                    t.len()
                )));
            }
            if let Some(&bad) = t.iter().find(|&&v| !domain.contains(v)) {
                return Err(Error::Model(format!(
                    "relation `{name}` contains element {bad} outside domain of size {}",
                    domain.size()
                )));
            }
            set.insert(t);
        }
        Ok(Self {
            name,
            arity,
            domain,
            tuples: set,
        })
    }

    /// The unary singleton `{(value)}`.
    pub fn singleton(name: impl Into<String>, domain: DomainSpec, value: Element) -> Result<Self> {
        Self::new(name, 1, domain, [vec![value]])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn tuples(&self) -> &BTreeSet<ValueTuple> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Element]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..self.clone()
        }
    }
}

/// Fast membership index for the tuples of one relation.
///
/// Relations over small tuple spaces use a bitset over lexicographic ranks;
/// everything else falls back to hashing the tuples.
pub(crate) enum TupleIndex {
    Dense {
        domain: DomainSpec,
        bits: fixedbitset::FixedBitSet,
    },
    Sparse(std::collections::HashSet<ValueTuple>),
}

const DENSE_LIMIT: u128 = 1 << 26;

impl TupleIndex {
    pub(crate) fn build(relation: &Relation) -> Self {
        let domain = relation.domain();
        let space = domain.power_count(relation.arity());
        if space <= DENSE_LIMIT {
            let mut bits = fixedbitset::FixedBitSet::with_capacity(space as usize);
            for t in relation.tuples() {
                bits.insert(domain.rank(t) as usize);
            }
            TupleIndex::Dense { domain, bits }
        } else {
            TupleIndex::Sparse(relation.tuples().iter().cloned().collect())
        }
    }

    pub(crate) fn contains(&self, tuple: &[Element]) -> bool {
        match self {
            TupleIndex::Dense { domain, bits } => bits.contains(domain.rank(tuple) as usize),
            TupleIndex::Sparse(set) => set.contains(tuple),
        }
    }
}
