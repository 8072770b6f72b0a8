use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::language::ConstraintLanguage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// `R(v_1, .., v_s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub relation: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new<S: Into<String>>(relation: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        Self {
            relation: relation.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    pub fn renamed(&self, rename: impl Fn(&str) -> String) -> Self {
        Self {
            relation: self.relation.clone(),
            args: self.args.iter().map(|a| rename(a)).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.relation, self.args.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantifiedVar {
    pub quantifier: Quantifier,
    pub var: String,
}

impl QuantifiedVar {
    pub fn forall(var: impl Into<String>) -> Self {
        Self {
            quantifier: Quantifier::Forall,
            var: var.into(),
        }
    }

    pub fn exists(var: impl Into<String>) -> Self {
        Self {
            quantifier: Quantifier::Exists,
            var: var.into(),
        }
    }
}

/// One problem found by [`QuantifiedSentence::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    UnknownRelation { atom: usize, relation: String },
    Arity { atom: usize, relation: String, expected: usize, found: usize },
    Unquantified { atom: usize, var: String },
    DuplicateQuantifier { var: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownRelation { atom, relation } => {
                write!(f, "atom #{atom}: unknown relation `{relation}`")
            }
            Violation::Arity {
                atom,
                relation,
                expected,
                found,
            } => write!(f, "atom #{atom}: `{relation}` has arity {expected} but is applied to {found} arguments"),
            Violation::Unquantified { atom, var } => write!(f, "atom #{atom}: variable `{var}` is not quantified"),
            Violation::DuplicateQuantifier { var } => write!(f, "variable `{var}` is quantified more than once"),
        }
    }
}

/// A prenex sentence `Q_1 v_1 .. Q_n v_n  R_1(..) ∧ .. ∧ R_s(..)` over a language.
///
/// An empty matrix denotes TRUE.
#[derive(Clone, Debug)]
pub struct QuantifiedSentence {
    language: Arc<ConstraintLanguage>,
    prefix: Vec<QuantifiedVar>,
    matrix: Vec<Atom>,
}

impl PartialEq for QuantifiedSentence {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.language, &other.language) || self.language == other.language)
            && self.prefix == other.prefix
            && self.matrix == other.matrix
    }
}

impl Eq for QuantifiedSentence {}

impl QuantifiedSentence {
    /// Builds a sentence, failing with the first violation found.
    pub fn new(language: Arc<ConstraintLanguage>, prefix: Vec<QuantifiedVar>, matrix: Vec<Atom>) -> Result<Self> {
        let s = Self::new_unchecked(language, prefix, matrix);
        let report = s.validate();
        if let Some(v) = report.first() {
            return Err(Error::InvalidSentence(v.to_string()));
        }
        Ok(s)
    }

    /// Builds a sentence without checking invariants; use [`QuantifiedSentence::validate`] to inspect it.
    pub fn new_unchecked(language: Arc<ConstraintLanguage>, prefix: Vec<QuantifiedVar>, matrix: Vec<Atom>) -> Self {
        Self {
            language,
            prefix,
            matrix,
        }
    }

    /// Every violated invariant, in prefix order then atom order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let mut seen = HashSet::new();
        let mut reported_dup = HashSet::new();
        for q in &self.prefix {
            if !seen.insert(q.var.as_str()) && reported_dup.insert(q.var.as_str()) {
                report.push(Violation::DuplicateQuantifier { var: q.var.clone() });
            }
        }
        for (i, atom) in self.matrix.iter().enumerate() {
            match self.language.get(&atom.relation) {
                None => report.push(Violation::UnknownRelation {
                    atom: i,
                    relation: atom.relation.clone(),
                }),
                Some(rel) if rel.arity() != atom.args.len() => report.push(Violation::Arity {
                    atom: i,
                    relation: atom.relation.clone(),
                    expected: rel.arity(),
                    found: atom.args.len(),
                }),
                Some(_) => {}
            }
            for v in &atom.args {
                if !seen.contains(v.as_str()) {
                    report.push(Violation::Unquantified { atom: i, var: v.clone() });
                }
            }
        }
        report
    }

    pub fn language(&self) -> &Arc<ConstraintLanguage> {
        &self.language
    }

    pub fn prefix(&self) -> &[QuantifiedVar] {
        &self.prefix
    }

    pub fn matrix(&self) -> &[Atom] {
        &self.matrix
    }

    pub fn into_parts(self) -> (Arc<ConstraintLanguage>, Vec<QuantifiedVar>, Vec<Atom>) {
        (self.language, self.prefix, self.matrix)
    }

    pub fn universal_count(&self) -> usize {
        self.prefix.iter().filter(|q| q.quantifier == Quantifier::Forall).count()
    }

    pub fn existential_count(&self) -> usize {
        self.prefix.len() - self.universal_count()
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.prefix.iter().map(|q| q.var.as_str())
    }

    /// Prefix of the form ∀*∃*.
    pub fn is_pi2(&self) -> bool {
        let first_exists = self
            .prefix
            .iter()
            .position(|q| q.quantifier == Quantifier::Exists)
            .unwrap_or(self.prefix.len());
        self.prefix[first_exists..]
            .iter()
            .all(|q| q.quantifier == Quantifier::Exists)
    }

    /// Size measure used in traces: atoms plus quantified variables.
    pub fn size(&self) -> usize {
        self.matrix.len() + self.prefix.len()
    }

    /// Position of every variable in the prefix.
    pub fn positions(&self) -> HashMap<&str, usize> {
        self.prefix
            .iter()
            .enumerate()
            .map(|(i, q)| (q.var.as_str(), i))
            .collect()
    }
}

impl fmt::Display for QuantifiedSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.prefix {
            let sym = match q.quantifier {
                Quantifier::Forall => "∀",
                Quantifier::Exists => "∃",
            };
            write!(f, "{sym}{} ", q.var)?;
        }
        if self.matrix.is_empty() {
            return f.write_str("TRUE");
        }
        for (i, a) in self.matrix.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// A conjunction of atoms with every variable existentially quantified.
#[derive(Clone, Debug)]
pub struct CspInstance {
    language: Arc<ConstraintLanguage>,
    variables: Vec<String>,
    atoms: Vec<Atom>,
}

impl PartialEq for CspInstance {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.language, &other.language) || self.language == other.language)
            && self.variables == other.variables
            && self.atoms == other.atoms
    }
}

impl Eq for CspInstance {}

impl CspInstance {
    pub fn new(language: Arc<ConstraintLanguage>, variables: Vec<String>, atoms: Vec<Atom>) -> Result<Self> {
        let sentence = QuantifiedSentence::new(
            language,
            variables.into_iter().map(QuantifiedVar::exists).collect(),
            atoms,
        )?;
        Ok(Self::from_sentence_unchecked(sentence))
    }

    /// Reads an all-existential sentence as an instance.
    pub fn from_sentence(sentence: QuantifiedSentence) -> Result<Self> {
        if sentence.universal_count() > 0 {
            return Err(Error::InvalidArgument(
                "a CSP instance cannot contain universally quantified variables".into(),
            ));
        }
        Ok(Self::from_sentence_unchecked(sentence))
    }

    fn from_sentence_unchecked(sentence: QuantifiedSentence) -> Self {
        let (language, prefix, atoms) = sentence.into_parts();
        Self {
            language,
            variables: prefix.into_iter().map(|q| q.var).collect(),
            atoms,
        }
    }

    pub fn to_sentence(&self) -> QuantifiedSentence {
        QuantifiedSentence::new_unchecked(
            self.language.clone(),
            self.variables.iter().cloned().map(QuantifiedVar::exists).collect(),
            self.atoms.clone(),
        )
    }

    pub fn language(&self) -> &Arc<ConstraintLanguage> {
        &self.language
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DomainSpec, Relation};

    fn lang() -> Arc<ConstraintLanguage> {
        let d = DomainSpec::new(2).unwrap();
        let xor0 = Relation::new("XOR0", 3, d, [vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap();
        Arc::new(ConstraintLanguage::with_relations(d, [xor0]).unwrap())
    }

    #[test]
    fn well_formed_sentence_has_empty_report() {
        let s = QuantifiedSentence::new_unchecked(
            lang(),
            vec![QuantifiedVar::forall("a"), QuantifiedVar::forall("b"), QuantifiedVar::exists("c")],
            vec![Atom::new("XOR0", ["a", "b", "c"])],
        );
        assert!(s.validate().is_empty());
    }

    #[test]
    fn arity_violation_reported_once() {
        let s = QuantifiedSentence::new_unchecked(
            lang(),
            vec![QuantifiedVar::forall("a"), QuantifiedVar::exists("c")],
            vec![Atom::new("XOR0", ["a", "c"])],
        );
        let report = s.validate();
        assert_eq!(report.len(), 1);
        assert!(matches!(report[0], Violation::Arity { expected: 3, found: 2, .. }));
    }

    #[test]
    fn duplicate_quantifier_reported_once() {
        let s = QuantifiedSentence::new_unchecked(
            lang(),
            vec![QuantifiedVar::forall("a"), QuantifiedVar::exists("a"), QuantifiedVar::exists("b")],
            vec![Atom::new("XOR0", ["a", "a", "b"])],
        );
        assert_eq!(s.validate(), vec![Violation::DuplicateQuantifier { var: "a".into() }]);
    }

    #[test]
    fn unknown_and_unquantified_reported() {
        let s = QuantifiedSentence::new_unchecked(lang(), vec![], vec![Atom::new("NOPE", ["x"])]);
        let report = s.validate();
        assert_eq!(report.len(), 2);
        assert!(QuantifiedSentence::new(lang(), vec![], vec![Atom::new("NOPE", ["x"])]).is_err());
    }

    #[test]
    fn pi2_shape() {
        let mk = |p: Vec<QuantifiedVar>| QuantifiedSentence::new_unchecked(lang(), p, vec![]);
        assert!(mk(vec![]).is_pi2());
        assert!(mk(vec![QuantifiedVar::forall("a"), QuantifiedVar::exists("b")]).is_pi2());
        assert!(!mk(vec![QuantifiedVar::exists("b"), QuantifiedVar::forall("a")]).is_pi2());
    }
}
