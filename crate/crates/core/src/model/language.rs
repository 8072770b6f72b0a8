use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::domain::{DomainSpec, Element};
use crate::model::relation::Relation;

/// Name of the unary singleton relation `x = value` added by [`ConstraintLanguage::with_constants`].
pub fn constant_name(value: Element) -> String {
    format!("const_{value}")
}

/// Named relations over a single domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintLanguage {
    domain: DomainSpec,
    relations: BTreeMap<String, Relation>,
}

impl ConstraintLanguage {
    pub fn new(domain: DomainSpec) -> Self {
        Self {
            domain,
            relations: BTreeMap::new(),
        }
    }

    pub fn with_relations<I: IntoIterator<Item = Relation>>(domain: DomainSpec, relations: I) -> Result<Self> {
        let mut lang = Self::new(domain);
        for r in relations {
            lang.add(r)?;
        }
        Ok(lang)
    }

    pub fn add(&mut self, relation: Relation) -> Result<()> {
        if relation.domain() != self.domain {
            return Err(Error::DomainMismatch(format!(
                "relation `{}` is over a domain of size {}, language domain has size {}",
                relation.name(),
                relation.domain().size(),
                self.domain.size()
            )));
        }
        if self.relations.contains_key(relation.name()) {
            return Err(Error::Model(format!("duplicate relation `{}`", relation.name())));
        }
        self.relations.insert(relation.name().to_string(), relation);
        Ok(())
    }

    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    /// Relations in name order.
    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.values()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Γ extended with the singletons `const_a = {(a)}` for every element `a`.
    ///
    /// An existing relation with a constant's name is accepted only if it is that singleton.
    pub fn with_constants(&self) -> Result<Self> {
        let mut lang = self.clone();
        for a in self.domain.elements() {
            let constant = Relation::singleton(constant_name(a), self.domain, a)?;
            match lang.relations.get(constant.name()) {
                Some(existing) if existing == &constant => {}
                Some(_) => {
                    return Err(Error::Model(format!(
                        "relation `{}` clashes with the constant relation of the same name",
                        constant.name()
                    )))
                }
                None => lang.add(constant)?,
            }
        }
        Ok(lang)
    }

    /// If `name` is a constant relation `const_a` of this language, returns `a`.
    pub fn constant_value(&self, name: &str) -> Option<Element> {
        let rel = self.get(name)?;
        if rel.arity() == 1 && rel.len() == 1 && name.starts_with("const_") {
            rel.tuples().iter().next().map(|t| t[0])
        } else {
            None
        }
    }
}
