use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use crate::algebra::OperationTable;
use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::model::{DomainSpec, Element, ValueTuple};

/// The least subset of A^n containing `seeds` and closed under coordinatewise application of every op.
///
/// Iterates by breadth-first frontier: each round applies every operation to
/// argument choices that use at least one tuple discovered in the previous round.
pub fn generate_closure(
    domain: DomainSpec,
    seeds: &[ValueTuple],
    ops: &[OperationTable],
    n: usize,
    budgets: &Budgets,
) -> Result<BTreeSet<ValueTuple>> {
    let space = domain.power_count(n);
    budgets.check_items(
        &format!("closure index over A^{n} with |A| = {}", domain.size()),
        space,
        budgets.max_closure,
        (n as u128) * 4 / 8 + 1,
    )?;
    for op in ops {
        if op.domain() != domain {
            return Err(Error::DomainMismatch(format!(
                "operation over a domain of size {} used in a closure over size {}",
                op.domain().size(),
                domain.size()
            )));
        }
    }
    if let Some(bad) = seeds.iter().find(|s| s.len() != n || s.iter().any(|&v| !domain.contains(v))) {
        return Err(Error::InvalidArgument(format!("seed {bad:?} is not a tuple of A^{n}")));
    }

    let mut seen = FixedBitSet::with_capacity(space as usize);
    let mut members: Vec<ValueTuple> = Vec::new();
    for s in seeds {
        let r = domain.rank(s) as usize;
        if !seen.put(r) {
            members.push(s.clone());
        }
    }

    let full = space as usize;
    let mut old_end = 0;
    let mut image = Vec::with_capacity(n);
    while old_end < members.len() && members.len() < full {
        let cur_end = members.len();
        for op in ops {
            let m = op.arity();
            for pivot in 0..m {
                // positions before the pivot draw from old tuples, the pivot from the frontier,
                // positions after it from everything known at the start of the round
                let ranges: Vec<(usize, usize)> = (0..m)
                    .map(|p| match p.cmp(&pivot) {
                        std::cmp::Ordering::Less => (0, old_end),
                        std::cmp::Ordering::Equal => (old_end, cur_end),
                        std::cmp::Ordering::Greater => (0, cur_end),
                    })
                    .collect();
                if ranges.iter().any(|(lo, hi)| lo >= hi) {
                    continue;
                }
                let mut choice: Vec<usize> = ranges.iter().map(|r| r.0).collect();
                loop {
                    {
                        let rows: Vec<&[Element]> = choice.iter().map(|&c| members[c].as_slice()).collect();
                        op.apply_columns(&rows, &mut image);
                    }
                    let r = domain.rank(&image) as usize;
                    if !seen.put(r) {
                        members.push(image.clone());
                        if members.len() == full {
                            break;
                        }
                    }
                    let mut pos = m;
                    let advanced = loop {
                        if pos == 0 {
                            break false;
                        }
                        pos -= 1;
                        choice[pos] += 1;
                        if choice[pos] < ranges[pos].1 {
                            break true;
                        }
                        choice[pos] = ranges[pos].0;
                    };
                    if !advanced {
                        break;
                    }
                }
                if members.len() == full {
                    break;
                }
            }
            if members.len() == full {
                break;
            }
        }
        old_end = cur_end;
    }
    Ok(members.into_iter().collect())
}
