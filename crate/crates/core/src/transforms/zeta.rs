use std::collections::HashMap;

use rayon::prelude::*;

use crate::algebra::Execution;
use crate::budget::{saturating_pow, Budgets};
use crate::error::Result;
use crate::model::{all_tuples, Atom, QuantifiedSentence, QuantifiedVar};
use crate::transforms::alternating::AlternatingSentence;
use crate::transforms::naming::{tag, Names};

/// ζ: the Π₂ sentence `∀x.. ∃y.. ⋀_{(a_1..a_n) ∈ A^n} Φ_{a_1..a_n}`.
///
/// In the copy for `(a_1..a_n)`, `y_i` becomes `y_i$a_1-..-a_{i-1}` (plain
/// `y_1`) and `x_i` becomes `x_i$a_1-..-a_i`. The prefix lists every renamed
/// `x` universally, then every renamed `y` existentially, both by index and
/// then lexicographically by superscript.
pub fn zeta(s: &AlternatingSentence, budgets: &Budgets) -> Result<QuantifiedSentence> {
    zeta_with(s, budgets, Execution::Sequential)
}

pub fn zeta_with(s: &AlternatingSentence, budgets: &Budgets, exec: Execution) -> Result<QuantifiedSentence> {
    let sentence = s.sentence();
    let domain = sentence.language().domain();
    let n = s.n();
    let copies = saturating_pow(domain.size() as u128, n as u128);
    budgets.check_items("ζ matrix copies", copies, budgets.max_copies, 1)?;
    let width = sentence.matrix().iter().map(|a| a.args.len()).max().unwrap_or(0) as u128;
    budgets.check_items(
        "ζ atoms",
        copies.saturating_mul(sentence.matrix().len() as u128),
        budgets.max_atoms,
        24 * (width + 1),
    )?;

    // names[i][prefix rank] for y_{i+1} (superscript length i) and x_{i+1} (length i+1)
    let mut names = Names::for_sentence(sentence);
    let mut y_names: Vec<Vec<String>> = Vec::with_capacity(n);
    let mut x_names: Vec<Vec<String>> = Vec::with_capacity(n);
    for i in 1..=n {
        let y = s.y(i);
        y_names.push(if i == 1 {
            vec![y.to_string()]
        } else {
            all_tuples(domain, i - 1).iter().map(|t| names.fresh(y, &tag(t))).collect()
        });
    }
    for i in 1..=n {
        let x = s.x(i);
        x_names.push(all_tuples(domain, i).iter().map(|t| names.fresh(x, &tag(t))).collect());
    }

    let size = domain.size() as usize;
    let build = |rank: usize| -> Vec<Atom> {
        let point = domain.unrank(rank as u64, n);
        let mut map: HashMap<&str, &str> = HashMap::with_capacity(2 * n);
        let mut prefix_rank = 0usize;
        for i in 0..n {
            map.insert(s.y(i + 1), &y_names[i][prefix_rank]);
            prefix_rank = prefix_rank * size + point[i] as usize;
            map.insert(s.x(i + 1), &x_names[i][prefix_rank]);
        }
        sentence
            .matrix()
            .iter()
            .map(|a| a.renamed(|v| map.get(v).map_or_else(|| v.to_string(), |r| r.to_string())))
            .collect()
    };
    let count = copies as usize;
    let parts: Vec<Vec<Atom>> = match exec {
        Execution::Parallel => (0..count).into_par_iter().map(build).collect(),
        Execution::Sequential => (0..count).map(build).collect(),
    };

    let mut prefix: Vec<QuantifiedVar> = x_names.iter().flatten().cloned().map(QuantifiedVar::forall).collect();
    prefix.extend(y_names.iter().flatten().cloned().map(QuantifiedVar::exists));
    Ok(QuantifiedSentence::new_unchecked(
        sentence.language().clone(),
        prefix,
        parts.into_iter().flatten().collect(),
    ))
}
