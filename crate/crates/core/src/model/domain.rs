use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A domain element, canonically `0..size`.
pub type Element = u32;

/// A finite domain `{0, .., size - 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DomainSpec {
    size: u32,
}

impl DomainSpec {
    pub fn new(size: u32) -> Result<Self> {
        if size == 0 {
            return Err(Error::Model("domain size must be at least 1".into()));
        }
        Ok(Self { size })
    }

    pub fn size(self) -> u32 {
        self.size
    }

    pub fn contains(self, value: Element) -> bool {
        value < self.size
    }

    pub fn elements(self) -> impl Iterator<Item = Element> + Clone {
        0..self.size
    }

    /// Number of tuples in A^n.
    pub fn power_count(self, n: usize) -> u128 {
        crate::budget::saturating_pow(self.size as u128, n as u128)
    }

    /// Lexicographic rank of a tuple over this domain (first coordinate most significant).
    pub fn rank(self, tuple: &[Element]) -> u64 {
        tuple
            .iter()
            .fold(0u64, |acc, &v| acc * self.size as u64 + v as u64)
    }

    /// Inverse of [`DomainSpec::rank`] for tuples of length `n`.
    pub fn unrank(self, mut rank: u64, n: usize) -> Vec<Element> {
        let base = self.size as u64;
        let mut out = vec![0; n];
        for slot in out.iter_mut().rev() {
            *slot = (rank % base) as Element;
            rank /= base;
        }
        out
    }
}

/// A tuple `(a_1, .., a_n)` of domain elements.
pub type ValueTuple = Vec<Element>;

/// Advances `tuple` to its lexicographic successor in A^n; returns false after the last one.
pub fn next_tuple(tuple: &mut [Element], size: u32) -> bool {
    for slot in tuple.iter_mut().rev() {
        if *slot + 1 < size {
            *slot += 1;
            return true;
        }
        *slot = 0;
    }
    false
}

/// All tuples of A^n in lexicographic order.
pub fn all_tuples(domain: DomainSpec, n: usize) -> Vec<ValueTuple> {
    let mut out = Vec::new();
    let mut current = vec![0; n];
    loop {
        out.push(current.clone());
        if !next_tuple(&mut current, domain.size()) {
            break;
        }
    }
    out
}
