use std::collections::HashSet;

use crate::model::QuantifiedSentence;

/// Hands out variable names that are unused in a sentence and by earlier calls.
///
/// Generated names contain `$`, which user input may not use.
pub(crate) struct Names {
    used: HashSet<String>,
}

impl Names {
    pub(crate) fn for_sentence(s: &QuantifiedSentence) -> Self {
        let mut used: HashSet<String> = s.variables().map(str::to_string).collect();
        for atom in s.matrix() {
            used.extend(atom.args.iter().cloned());
        }
        Self { used }
    }

    pub(crate) fn for_vars<'a>(vars: impl IntoIterator<Item = &'a str>) -> Self {
        Self {
            used: vars.into_iter().map(str::to_string).collect(),
        }
    }

    /// `{base}${tag}`, or a numbered variant of it if that is taken.
    pub(crate) fn fresh(&mut self, base: &str, tag: &str) -> String {
        let candidate = format!("{base}${tag}");
        if self.used.insert(candidate.clone()) {
            return candidate;
        }
        (2..)
            .map(|i| format!("{candidate}${i}"))
            .find(|c| self.used.insert(c.clone()))
            .expect("unbounded counter")
    }
}

/// Dash-joined digits, e.g. `0-1-1`.
pub(crate) fn tag(values: &[u32]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-")
}
