use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{QuantifiedSentence, QuantifiedVar, Quantifier};
use crate::transforms::naming::Names;

/// A sentence with prefix exactly `∃y_1 ∀x_1 ∃y_2 ∀x_2 .. ∃y_n ∀x_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingSentence {
    sentence: QuantifiedSentence,
}

impl AlternatingSentence {
    pub fn new(sentence: QuantifiedSentence) -> Result<Self> {
        let prefix = sentence.prefix();
        if !prefix.len().is_multiple_of(2) || prefix.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "alternating prefixes have even positive length, got {}",
                prefix.len()
            )));
        }
        for (i, q) in prefix.iter().enumerate() {
            let expected = if i % 2 == 0 { Quantifier::Exists } else { Quantifier::Forall };
            if q.quantifier != expected {
                return Err(Error::InvalidArgument(format!(
                    "prefix position {} binds `{}` with {}, expected {}",
                    i + 1,
                    q.var,
                    q.quantifier,
                    expected
                )));
            }
        }
        Ok(Self { sentence })
    }

    /// Number of ∃∀ pairs.
    pub fn n(&self) -> usize {
        self.sentence.prefix().len() / 2
    }

    /// `y_i`, 1-based.
    pub fn y(&self, i: usize) -> &str {
        &self.sentence.prefix()[2 * (i - 1)].var
    }

    /// `x_i`, 1-based.
    pub fn x(&self, i: usize) -> &str {
        &self.sentence.prefix()[2 * (i - 1) + 1].var
    }

    pub fn sentence(&self) -> &QuantifiedSentence {
        &self.sentence
    }

    pub fn into_sentence(self) -> QuantifiedSentence {
        self.sentence
    }
}

/// Pads the prefix with unconstrained dummy variables until it alternates ∃∀, starting with ∃ and ending with ∀.
///
/// Dummies are named `y$dN` (existential) and `x$dN` (universal).
pub fn normalize_alternating(s: &QuantifiedSentence) -> AlternatingSentence {
    let mut names = Names::for_sentence(s);
    let mut counter = 0usize;
    let mut dummy = |q: Quantifier, names: &mut Names| {
        counter += 1;
        let base = match q {
            Quantifier::Exists => "y",
            Quantifier::Forall => "x",
        };
        QuantifiedVar {
            quantifier: q,
            var: names.fresh(base, &format!("d{counter}")),
        }
    };
    let mut prefix = Vec::with_capacity(s.prefix().len() + 2);
    let mut expected = Quantifier::Exists;
    for q in s.prefix() {
        if q.quantifier != expected {
            prefix.push(dummy(expected, &mut names));
            expected = flip(expected);
        }
        prefix.push(q.clone());
        expected = flip(expected);
    }
    if prefix.len() % 2 == 1 {
        prefix.push(dummy(Quantifier::Forall, &mut names));
    }
    if prefix.is_empty() {
        prefix.push(dummy(Quantifier::Exists, &mut names));
        prefix.push(dummy(Quantifier::Forall, &mut names));
    }
    let sentence = QuantifiedSentence::new_unchecked(s.language().clone(), prefix, s.matrix().to_vec());
    AlternatingSentence::new(sentence).expect("padding yields an alternating prefix")
}

fn flip(q: Quantifier) -> Quantifier {
    match q {
        Quantifier::Exists => Quantifier::Forall,
        Quantifier::Forall => Quantifier::Exists,
    }
}

/// ω for the 1-based indices `n_1 < .. < n_k`.
///
/// Each `x_i` not listed is renamed to `z_j` where `n_j < i < n_{j+1}` (with
/// `n_0 = 0`, `n_{k+1} = n + 1`) and loses its quantifier; `∀z_0 .. ∀z_k` is
/// prepended. The remaining quantifiers keep their relative order.
pub fn omega(s: &AlternatingSentence, indices: &[usize]) -> Result<QuantifiedSentence> {
    let n = s.n();
    for (pos, &i) in indices.iter().enumerate() {
        if i == 0 || i > n {
            return Err(Error::InvalidArgument(format!("ω index {i} outside 1..={n}")));
        }
        if pos > 0 && indices[pos - 1] >= i {
            return Err(Error::InvalidArgument(format!("ω indices must strictly increase: {indices:?}")));
        }
    }
    let k = indices.len();
    let mut names = Names::for_sentence(s.sentence());
    let z: Vec<String> = (0..=k).map(|j| names.fresh("z", &j.to_string())).collect();

    let mut rename: HashMap<&str, &str> = HashMap::new();
    for i in 1..=n {
        if indices.binary_search(&i).is_err() {
            let j = indices.partition_point(|&nj| nj < i);
            rename.insert(s.x(i), &z[j]);
        }
    }

    let mut prefix: Vec<QuantifiedVar> = z.iter().map(|v| QuantifiedVar::forall(v.clone())).collect();
    prefix.extend(
        s.sentence()
            .prefix()
            .iter()
            .filter(|q| !rename.contains_key(q.var.as_str()))
            .cloned(),
    );
    let matrix = s
        .sentence()
        .matrix()
        .iter()
        .map(|a| a.renamed(|v| rename.get(v).map_or_else(|| v.to_string(), |z| z.to_string())))
        .collect();
    Ok(QuantifiedSentence::new_unchecked(s.sentence().language().clone(), prefix, matrix))
}

/// Every index set `1 <= n_1 < .. < n_k <= n` with `k <= r`, by size then lexicographically.
pub fn index_sets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 0..=r.min(n) {
        let mut current = Vec::with_capacity(k);
        combinations(1, n, k, &mut current, &mut out);
    }
    out
}

fn combinations(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    for i in start..=n {
        if n - i + 1 < k - current.len() {
            break;
        }
        current.push(i);
        combinations(i + 1, n, k, current, out);
        current.pop();
    }
}
