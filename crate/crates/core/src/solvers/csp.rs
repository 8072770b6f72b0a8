//! Backtracking CSP search with generalized arc consistency.
//!
//! Branching picks the undecided variable with the smallest domain (ties by
//! instance order) and tries values in increasing order. Once the undecided
//! variables fall apart into independent groups, each group is solved on its
//! own.

use std::collections::{BTreeMap, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::budget::Budgets;
use crate::error::{BudgetExceeded, Error, Result};
use crate::model::{CspInstance, Element, ValueTuple};
use crate::solvers::{Method, SolveStats, SolveVerdict};

struct Compiled {
    size: usize,
    var_count: usize,
    atoms: Vec<(usize, Vec<usize>)>,
    tuples: Vec<Vec<ValueTuple>>,
    atoms_of: Vec<Vec<usize>>,
    constants: Vec<(usize, Element)>,
}

fn compile(inst: &CspInstance) -> Result<Compiled> {
    let sentence = inst.to_sentence();
    if let Some(v) = sentence.validate().into_iter().next() {
        return Err(Error::InvalidSentence(v.to_string()));
    }
    let lang = inst.language();
    let index: HashMap<&str, usize> = inst.variables().iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut relation_ids: HashMap<&str, usize> = HashMap::new();
    let mut tuples = Vec::new();
    let mut atoms = Vec::new();
    let mut constants = Vec::new();
    let mut atoms_of = vec![Vec::new(); inst.variables().len()];
    for atom in inst.atoms() {
        let args: Vec<usize> = atom.args.iter().map(|v| index[v.as_str()]).collect();
        let rel = lang.get(&atom.relation).expect("validated");
        if let Some(a) = lang.constant_value(&atom.relation) {
            if rel.len() == 1 && rel.contains(&[a]) {
                constants.push((args[0], a));
                continue;
            }
        }
        let id = *relation_ids.entry(atom.relation.as_str()).or_insert_with(|| {
            tuples.push(rel.tuples().iter().cloned().collect());
            tuples.len() - 1
        });
        for &v in &args {
            if atoms_of[v].last() != Some(&atoms.len()) {
                atoms_of[v].push(atoms.len());
            }
        }
        atoms.push((id, args));
    }
    Ok(Compiled {
        size: lang.domain().size() as usize,
        var_count: inst.variables().len(),
        atoms,
        tuples,
        atoms_of,
        constants,
    })
}

/// Variable domains as fixed-width bit rows, with an undo trail.
struct Domains {
    words: usize,
    bits: Vec<u64>,
    trail_vars: Vec<usize>,
    trail_bits: Vec<u64>,
}

impl Domains {
    fn new(var_count: usize, size: usize) -> Self {
        let words = size.div_ceil(64).max(1);
        let mut row = vec![0u64; words];
        for x in 0..size {
            row[x / 64] |= 1 << (x % 64);
        }
        Self {
            words,
            bits: row.repeat(var_count),
            trail_vars: Vec::new(),
            trail_bits: Vec::new(),
        }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    fn count(&self, v: usize) -> u32 {
        self.row(v).iter().map(|w| w.count_ones()).sum()
    }

    fn contains(&self, v: usize, x: usize) -> bool {
        self.row(v)[x / 64] >> (x % 64) & 1 == 1
    }

    fn values(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in self.row(v).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(i * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    fn save(&mut self, v: usize) {
        self.trail_vars.push(v);
        let (a, b) = (v * self.words, (v + 1) * self.words);
        self.trail_bits.extend_from_slice(&self.bits[a..b]);
    }

    /// Intersects the domain of `v` with `mask`; returns the new size when it shrank.
    fn restrict(&mut self, v: usize, mask: &[u64]) -> Option<u32> {
        let row = self.row(v);
        if row.iter().zip(mask).all(|(r, m)| r & !m == 0) {
            return None;
        }
        self.save(v);
        let w = self.words;
        for (r, m) in self.bits[v * w..(v + 1) * w].iter_mut().zip(mask) {
            *r &= m;
        }
        Some(self.count(v))
    }

    fn assign(&mut self, v: usize, x: usize) {
        self.save(v);
        let w = self.words;
        let row = &mut self.bits[v * w..(v + 1) * w];
        row.fill(0);
        row[x / 64] = 1 << (x % 64);
    }

    fn mark(&self) -> usize {
        self.trail_vars.len()
    }

    fn undo(&mut self, mark: usize) {
        let w = self.words;
        while self.trail_vars.len() > mark {
            let v = self.trail_vars.pop().expect("nonempty trail");
            let start = self.trail_bits.len() - w;
            self.bits[v * w..(v + 1) * w].copy_from_slice(&self.trail_bits[start..]);
            self.trail_bits.truncate(start);
        }
    }
}

struct Solver<'a> {
    c: &'a Compiled,
    doms: Domains,
    queue: VecDeque<usize>,
    queued: FixedBitSet,
    support: Vec<u64>,
    local: Vec<usize>,
    nodes: u64,
    limit: u128,
}

impl Solver<'_> {
    fn enqueue(&mut self, a: usize) {
        if !self.queued.contains(a) {
            self.queued.insert(a);
            self.queue.push_back(a);
        }
    }

    /// Prunes unsupported values until every queued atom is consistent; false on a wipe-out.
    fn propagate(&mut self) -> bool {
        let w = self.doms.words;
        while let Some(a) = self.queue.pop_front() {
            self.queued.set(a, false);
            let (rel, args) = &self.c.atoms[a];
            self.support.clear();
            self.support.resize(args.len() * w, 0);
            'tuples: for t in &self.c.tuples[*rel] {
                for (i, &v) in args.iter().enumerate() {
                    if !self.doms.contains(v, t[i] as usize) {
                        continue 'tuples;
                    }
                    // repeated variables must take one value
                    if args[..i].iter().zip(t.iter()).any(|(&u, &x)| u == v && x != t[i]) {
                        continue 'tuples;
                    }
                }
                for (i, &x) in t.iter().enumerate() {
                    self.support[i * w + x as usize / 64] |= 1 << (x % 64);
                }
            }
            for (i, &v) in args.iter().enumerate() {
                let mask = self.support[i * w..(i + 1) * w].to_vec();
                match self.doms.restrict(v, &mask) {
                    Some(0) => {
                        while let Some(b) = self.queue.pop_front() {
                            self.queued.set(b, false);
                        }
                        return false;
                    }
                    Some(_) => {
                        for &b in &self.c.atoms_of[v] {
                            if b != a {
                                self.enqueue(b);
                            }
                        }
                    }
                    None => {}
                }
            }
        }
        true
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes as u128 > self.limit {
            return Err(Error::Budget(BudgetExceeded {
                what: "CSP search nodes".into(),
                required: self.nodes as u128,
                limit: self.limit,
            }));
        }
        Ok(())
    }

    /// Solves the undecided variables among `vars`, constrained by `atoms`.
    fn search(&mut self, vars: &[usize], atoms: &[usize]) -> Result<bool> {
        let open: Vec<usize> = vars.iter().copied().filter(|&v| self.doms.count(v) > 1).collect();
        if open.is_empty() {
            return Ok(true);
        }
        let groups = self.groups(&open, atoms);
        if groups.len() > 1 {
            for (gv, ga) in &groups {
                if !self.search(gv, ga)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let (_, live_atoms) = &groups[0];
        let v = *open
            .iter()
            .min_by_key(|&&v| (self.doms.count(v), v))
            .expect("nonempty");
        for value in self.doms.values(v) {
            self.tick()?;
            let mark = self.doms.mark();
            self.doms.assign(v, value);
            for &a in &self.c.atoms_of[v] {
                self.enqueue(a);
            }
            if self.propagate() && self.search(&open, live_atoms)? {
                return Ok(true);
            }
            self.doms.undo(mark);
        }
        Ok(false)
    }

    /// Connected groups of `open` variables, linked by atoms with two or more of them,
    /// each with the atoms that still mention one of its variables.
    fn groups(&mut self, open: &[usize], atoms: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
        for (l, &v) in open.iter().enumerate() {
            self.local[v] = l;
        }
        let mut parent: Vec<usize> = (0..open.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut owner = Vec::with_capacity(atoms.len());
        for &a in atoms {
            let mut first = None;
            for &v in &self.c.atoms[a].1 {
                let l = self.local[v];
                if l == usize::MAX {
                    continue;
                }
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
            owner.push(first);
        }
        let mut index_of_root = vec![usize::MAX; open.len()];
        let mut out: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for (l, &v) in open.iter().enumerate() {
            let r = find(&mut parent, l);
            if index_of_root[r] == usize::MAX {
                index_of_root[r] = out.len();
                out.push((Vec::new(), Vec::new()));
            }
            out[index_of_root[r]].0.push(v);
        }
        for (&a, o) in atoms.iter().zip(&owner) {
            if let Some(l) = o {
                let g = index_of_root[find(&mut parent, *l)];
                out[g].1.push(a);
            }
        }
        for &v in open {
            self.local[v] = usize::MAX;
        }
        out
    }
}

/// Satisfiability of `inst`, with a satisfying assignment when there is one.
pub fn solve_csp(inst: &CspInstance, budgets: &Budgets) -> Result<SolveVerdict> {
    let c = compile(inst)?;
    let mut solver = Solver {
        c: &c,
        doms: Domains::new(c.var_count, c.size),
        queue: VecDeque::new(),
        queued: FixedBitSet::with_capacity(c.atoms.len()),
        support: Vec::new(),
        local: vec![usize::MAX; c.var_count],
        nodes: 0,
        limit: budgets.max_oracle_nodes,
    };
    let verdict = |truth: bool, witness, nodes| SolveVerdict {
        truth,
        method: Method::Csp,
        witness,
        stats: SolveStats { nodes, instances: 1 },
    };

    for &(v, a) in &c.constants {
        if !solver.doms.contains(v, a as usize) {
            return Ok(verdict(false, None, 0));
        }
        solver.doms.assign(v, a as usize);
    }
    for a in 0..c.atoms.len() {
        solver.enqueue(a);
    }
    if !solver.propagate() {
        return Ok(verdict(false, None, 0));
    }
    let vars: Vec<usize> = (0..c.var_count).collect();
    let atoms: Vec<usize> = (0..c.atoms.len()).collect();
    if !solver.search(&vars, &atoms)? {
        return Ok(verdict(false, None, solver.nodes));
    }
    let witness: BTreeMap<String, Element> = inst
        .variables()
        .iter()
        .enumerate()
        .map(|(v, name)| (name.clone(), solver.doms.values(v)[0] as Element))
        .collect();
    Ok(verdict(true, Some(witness), solver.nodes))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::format::{parse_language, parse_sentence};
    use crate::model::{Atom, ConstraintLanguage};
    use crate::transforms::eliminate_universals;

    fn lang() -> Arc<ConstraintLanguage> {
        Arc::new(
            parse_language(
                "domain 2\nrelation XOR0 3\n0 0 0\n0 1 1\n1 0 1\n1 1 0\nend\nrelation NOT 2\n0 1\n1 0\nend\nrelation EMPTY 1\nend\n",
            )
            .unwrap(),
        )
    }

    fn satisfies(inst: &CspInstance, witness: &BTreeMap<String, Element>) -> bool {
        inst.atoms().iter().all(|a| {
            let t: Vec<Element> = a.args.iter().map(|v| witness[v]).collect();
            inst.language().get(&a.relation).unwrap().contains(&t)
        })
    }

    #[test]
    fn eliminated_not_example() {
        let s = parse_sentence("forall x\nexists y\nconstraint NOT x y\n", lang()).unwrap();
        let inst = eliminate_universals(&s, &Budgets::default()).unwrap();
        let v = solve_csp(&inst, &Budgets::default()).unwrap();
        assert!(v.truth);
        let w = v.witness.unwrap();
        assert!(satisfies(&inst, &w));
        let got: Vec<Element> = ["x$1", "x$2", "y$1", "y$2"].iter().map(|n| w[*n]).collect();
        assert_eq!(got, vec![0, 1, 1, 0]);
    }

    #[test]
    fn empty_relation_and_empty_instance() {
        let inst = CspInstance::new(lang(), vec!["a".into()], vec![Atom::new("EMPTY", ["a"])]).unwrap();
        assert!(!solve_csp(&inst, &Budgets::default()).unwrap().truth);
        let inst = CspInstance::new(lang(), vec![], vec![]).unwrap();
        let v = solve_csp(&inst, &Budgets::default()).unwrap();
        assert!(v.truth);
        assert_eq!(v.witness, Some(BTreeMap::new()));
    }

    #[test]
    fn repeated_variables() {
        let inst = CspInstance::new(lang(), vec!["a".into()], vec![Atom::new("NOT", ["a", "a"])]).unwrap();
        assert!(!solve_csp(&inst, &Budgets::default()).unwrap().truth);
        let inst = CspInstance::new(
            lang(),
            vec!["a".into(), "b".into()],
            vec![Atom::new("XOR0", ["a", "a", "b"])],
        )
        .unwrap();
        let v = solve_csp(&inst, &Budgets::default()).unwrap();
        assert_eq!(v.witness.unwrap()["b"], 0);
    }

    #[test]
    fn odd_cycle_of_disequalities_is_unsatisfiable() {
        let vars: Vec<String> = (0..5).map(|i| format!("v{i}")).collect();
        let atoms = (0..5).map(|i| Atom::new("NOT", [vars[i].clone(), vars[(i + 1) % 5].clone()])).collect();
        let inst = CspInstance::new(lang(), vars, atoms).unwrap();
        assert!(!solve_csp(&inst, &Budgets::default()).unwrap().truth);
    }
}
