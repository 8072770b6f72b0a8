//! Exact evaluation of quantified sentences by game-tree search.
//!
//! Variables are branched on in prefix order. Before branching, the atoms that
//! still mention unassigned variables are split into connected components;
//! a prenex sentence whose matrix splits into variable-disjoint parts is the
//! conjunction of the parts under the restricted prefixes, so each component
//! is evaluated on its own.

use std::collections::HashMap;

use crate::budget::Budgets;
use crate::error::{BudgetExceeded, Error, Result};
use crate::model::{Element, QuantifiedSentence, Quantifier, TupleIndex};
use crate::solvers::{Method, SolveStats, SolveVerdict};

const UNASSIGNED: Element = Element::MAX;

struct Compiled {
    quantifiers: Vec<Quantifier>,
    atoms: Vec<(usize, Vec<usize>)>,
    relations: Vec<TupleIndex>,
    size: Element,
}

fn compile(s: &QuantifiedSentence) -> Result<Compiled> {
    if let Some(v) = s.validate().into_iter().next() {
        return Err(Error::InvalidSentence(v.to_string()));
    }
    let index: HashMap<&str, usize> = s.prefix().iter().enumerate().map(|(i, q)| (q.var.as_str(), i)).collect();
    let mut relation_ids: HashMap<&str, usize> = HashMap::new();
    let mut relations = Vec::new();
    let mut atoms = Vec::with_capacity(s.matrix().len());
    for atom in s.matrix() {
        let id = *relation_ids.entry(atom.relation.as_str()).or_insert_with(|| {
            let r = s.language().get(&atom.relation).expect("validated");
            relations.push(TupleIndex::build(r));
            relations.len() - 1
        });
        atoms.push((id, atom.args.iter().map(|v| index[v.as_str()]).collect()));
    }
    Ok(Compiled {
        quantifiers: s.prefix().iter().map(|q| q.quantifier).collect(),
        atoms,
        relations,
        size: s.language().domain().size(),
    })
}

struct Search<'a> {
    c: &'a Compiled,
    assignment: Vec<Element>,
    scratch: Vec<Element>,
    nodes: u64,
    limit: u128,
}

impl Search<'_> {
    fn holds(&mut self, atom: usize) -> bool {
        let (rel, args) = &self.c.atoms[atom];
        self.scratch.clear();
        self.scratch.extend(args.iter().map(|&v| self.assignment[v]));
        self.c.relations[*rel].contains(&self.scratch)
    }

    fn assigned(&self, atom: usize) -> bool {
        self.c.atoms[atom].1.iter().all(|&v| self.assignment[v] != UNASSIGNED)
    }

    /// Truth of the sentence restricted to `atoms`, with `vars` (ascending) still to quantify.
    fn eval(&mut self, vars: &[usize], atoms: &[usize]) -> Result<bool> {
        let mut open = Vec::with_capacity(atoms.len());
        for &a in atoms {
            if self.assigned(a) {
                if !self.holds(a) {
                    return Ok(false);
                }
            } else {
                open.push(a);
            }
        }
        if open.is_empty() {
            return Ok(true);
        }

        // union-find over the positions of `vars`
        let mut parent: Vec<usize> = (0..vars.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let local = |v: usize| vars.binary_search(&v).expect("unassigned variables are pending");
        let mut used = vec![false; vars.len()];
        for &a in &open {
            let mut first = None;
            for &v in &self.c.atoms[a].1 {
                if self.assignment[v] != UNASSIGNED {
                    continue;
                }
                let l = local(v);
                used[l] = true;
                match first {
                    None => first = Some(l),
                    Some(f) => {
                        let (x, y) = (find(&mut parent, f), find(&mut parent, l));
                        if x != y {
                            parent[x.max(y)] = x.min(y);
                        }
                    }
                }
            }
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut component_of = vec![usize::MAX; vars.len()];
        for l in 0..vars.len() {
            if used[l] {
                let r = find(&mut parent, l);
                if component_of[r] == usize::MAX {
                    component_of[r] = roots.len();
                    roots.push(r);
                }
                component_of[l] = component_of[r];
            }
        }

        if roots.len() > 1 {
            let mut comp_vars: Vec<Vec<usize>> = vec![Vec::new(); roots.len()];
            let mut comp_atoms: Vec<Vec<usize>> = vec![Vec::new(); roots.len()];
            for (l, &v) in vars.iter().enumerate() {
                if used[l] {
                    comp_vars[component_of[l]].push(v);
                }
            }
            for &a in &open {
                let v = *self.c.atoms[a]
                    .1
                    .iter()
                    .find(|&&v| self.assignment[v] == UNASSIGNED)
                    .expect("open atom");
                comp_atoms[component_of[local(v)]].push(a);
            }
            for (cv, ca) in comp_vars.iter().zip(&comp_atoms) {
                if !self.branch(cv, ca)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }

        let live: Vec<usize> = vars.iter().enumerate().filter(|(l, _)| used[*l]).map(|(_, &v)| v).collect();
        self.branch(&live, &open)
    }

    /// Quantifies the first of `vars` and evaluates the rest.
    fn branch(&mut self, vars: &[usize], atoms: &[usize]) -> Result<bool> {
        let (&v, rest) = vars.split_first().expect("open atoms have pending variables");
        let forall = self.c.quantifiers[v] == Quantifier::Forall;
        for value in 0..self.c.size {
            self.nodes += 1;
            if self.nodes as u128 > self.limit {
                self.assignment[v] = UNASSIGNED;
                return Err(Error::Budget(BudgetExceeded {
                    what: "oracle game-tree nodes".into(),
                    required: self.nodes as u128,
                    limit: self.limit,
                }));
            }
            self.assignment[v] = value;
            let result = self.eval(rest, atoms);
            let holds = match result {
                Ok(h) => h,
                Err(e) => {
                    self.assignment[v] = UNASSIGNED;
                    return Err(e);
                }
            };
            if holds != forall {
                self.assignment[v] = UNASSIGNED;
                return Ok(holds);
            }
        }
        self.assignment[v] = UNASSIGNED;
        Ok(forall)
    }
}

/// Exact truth value of `s`, using the prefix as given.
pub fn oracle_qcsp(s: &QuantifiedSentence, budgets: &Budgets) -> Result<SolveVerdict> {
    let compiled = compile(s)?;
    let mut search = Search {
        c: &compiled,
        assignment: vec![UNASSIGNED; compiled.quantifiers.len()],
        scratch: Vec::new(),
        nodes: 0,
        limit: budgets.max_oracle_nodes,
    };
    let vars: Vec<usize> = (0..compiled.quantifiers.len()).collect();
    let atoms: Vec<usize> = (0..compiled.atoms.len()).collect();
    let truth = search.eval(&vars, &atoms)?;
    Ok(SolveVerdict {
        truth,
        method: Method::Oracle,
        witness: None,
        stats: SolveStats {
            nodes: search.nodes,
            instances: 1,
        },
    })
}
