//! Switch combinatorics: a tuple has a switch at position `i` when `a[i-1] != a[i]`.

use crate::model::domain::{DomainSpec, Element, ValueTuple};

/// Number of positions `i >= 1` with `t[i] != t[i-1]`.
pub fn switch_count(t: &[Element]) -> usize {
    t.windows(2).filter(|w| w[0] != w[1]).count()
}

/// All tuples of A^n with at most `k` switches, in lexicographic order.
pub fn enumerate_switch_bounded(n: usize, k: usize, domain: DomainSpec) -> Vec<ValueTuple> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut current = Vec::with_capacity(n);
    extend(&mut current, n, k, domain.size(), &mut out);
    out
}

fn extend(current: &mut ValueTuple, n: usize, switches_left: usize, size: u32, out: &mut Vec<ValueTuple>) {
    if current.len() == n {
        out.push(current.clone());
        return;
    }
    for a in 0..size {
        let cost = match current.last() {
            Some(&prev) if prev != a => 1,
            _ => 0,
        };
        if cost > switches_left {
            continue;
        }
        current.push(a);
        extend(current, n, switches_left - cost, size, out);
        current.pop();
    }
}

/// `|A| · Σ_{s=0}^{min(k, n-1)} C(n-1, s)·(|A|-1)^s`, the number of tuples in A^n with at most `k` switches.
pub fn switch_bounded_count(n: usize, k: usize, domain: DomainSpec) -> u128 {
    if n == 0 {
        return 1;
    }
    let size = domain.size() as u128;
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for s in 0..=k.min(n - 1) {
        if s > 0 {
            binom = binom * (n - s) as u128 / s as u128;
        }
        total += binom * crate::budget::saturating_pow(size - 1, s as u128);
    }
    size * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn switch_count_examples() {
        assert_eq!(switch_count(&[1, 1, 0, 2, 0, 0, 0]), 3);
        assert_eq!(switch_count(&[0, 0, 0, 0]), 0);
        assert_eq!(switch_count(&[0, 1, 0]), 2);
        assert_eq!(switch_count(&[]), 0);
        assert_eq!(switch_count(&[2]), 0);
    }

    #[test]
    fn constant_tuples_only_at_zero_switches() {
        let d = DomainSpec::new(2).unwrap();
        assert_eq!(enumerate_switch_bounded(2, 0, d), vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn one_switch_cube() {
        let d = DomainSpec::new(2).unwrap();
        let got = enumerate_switch_bounded(3, 1, d);
        assert_eq!(got.len(), 6);
        assert!(!got.contains(&vec![0, 1, 0]));
        assert!(!got.contains(&vec![1, 0, 1]));
    }

    #[test]
    fn ternary_count() {
        let d = DomainSpec::new(3).unwrap();
        assert_eq!(enumerate_switch_bounded(4, 2, d).len(), 57);
        assert_eq!(switch_bounded_count(4, 2, d), 57);
    }
}
