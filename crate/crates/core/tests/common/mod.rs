//! Generators and brute-force reference evaluators shared by the integration suites.
//!
//! Nothing here calls into the solvers: truth is computed by plain enumeration
//! of the prefix, and closures by naive fixpoint iteration.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use qcsp::format::parse_language;
use qcsp::model::{
    Atom, ConstraintLanguage, CspInstance, DomainSpec, Element, QuantifiedSentence, QuantifiedVar, Quantifier, Relation,
    ValueTuple,
};
use rand::rngs::StdRng;
use rand::Rng;

pub const XOR0: &str = "domain 2\nrelation XOR0 3\n0 0 0\n0 1 1\n1 0 1\n1 1 0\nend\n";
pub const ONE_IN_THREE: &str = "domain 2\nrelation ONE-IN-THREE 3\n0 0 1\n0 1 0\n1 0 0\nend\n";

pub fn xor_lang() -> Arc<ConstraintLanguage> {
    Arc::new(parse_language(XOR0).unwrap())
}

/// Boolean language with an affine, a disequality, a clause and an order relation.
pub fn bool_lang() -> Arc<ConstraintLanguage> {
    let text = format!(
        "{XOR0}relation NOT 2\n0 1\n1 0\nend\nrelation OR 2\n0 1\n1 0\n1 1\nend\nrelation LEQ 2\n0 0\n0 1\n1 1\nend\n"
    );
    Arc::new(parse_language(&text).unwrap())
}

/// Three-element language: disequality plus a random binary and ternary relation.
pub fn random_lang3(rng: &mut StdRng) -> Arc<ConstraintLanguage> {
    let d = DomainSpec::new(3).unwrap();
    let neq = Relation::new("NEQ", 2, d, tuples(d, 2).into_iter().filter(|t| t[0] != t[1])).unwrap();
    let mut pick = |name: &str, arity: usize, density: f64| {
        let mut chosen: Vec<ValueTuple> = tuples(d, arity).into_iter().filter(|_| rng.gen_bool(density)).collect();
        if chosen.is_empty() {
            chosen.push(vec![0; arity]);
        }
        Relation::new(name, arity, d, chosen).unwrap()
    };
    let b = pick("B", 2, 0.6);
    let t = pick("T", 3, 0.5);
    Arc::new(ConstraintLanguage::with_relations(d, [neq, b, t]).unwrap())
}

pub fn tuples(d: DomainSpec, n: usize) -> Vec<ValueTuple> {
    let size = d.size();
    let total = (size as usize).pow(n as u32);
    (0..total)
        .map(|mut r| {
            let mut t = vec![0; n];
            for slot in t.iter_mut().rev() {
                *slot = (r % size as usize) as Element;
                r /= size as usize;
            }
            t
        })
        .collect()
}

fn var(i: usize) -> String {
    format!("v{i}")
}

pub fn random_atom(rng: &mut StdRng, lang: &ConstraintLanguage, vars: usize) -> Atom {
    let rels: Vec<&Relation> = lang.relations().collect();
    let r = rels[rng.gen_range(0..rels.len())];
    Atom::new(r.name(), (0..r.arity()).map(|_| var(rng.gen_range(0..vars))))
}

/// A random prenex sentence with `1..=max_vars` variables and `1..=max_atoms` atoms.
pub fn random_sentence(
    rng: &mut StdRng,
    lang: &Arc<ConstraintLanguage>,
    max_vars: usize,
    max_atoms: usize,
) -> QuantifiedSentence {
    let vars = rng.gen_range(1..=max_vars);
    let prefix = (0..vars)
        .map(|i| {
            if rng.gen_bool(0.5) {
                QuantifiedVar::forall(var(i))
            } else {
                QuantifiedVar::exists(var(i))
            }
        })
        .collect();
    let atoms = (0..rng.gen_range(1..=max_atoms)).map(|_| random_atom(rng, lang, vars)).collect();
    QuantifiedSentence::new(lang.clone(), prefix, atoms).unwrap()
}

/// A random sentence with prefix `∃y_1 ∀x_1 .. ∃y_n ∀x_n`.
pub fn random_alternating(
    rng: &mut StdRng,
    lang: &Arc<ConstraintLanguage>,
    n: usize,
    max_atoms: usize,
) -> QuantifiedSentence {
    let prefix = (0..2 * n)
        .map(|i| if i % 2 == 0 { QuantifiedVar::exists(var(i)) } else { QuantifiedVar::forall(var(i)) })
        .collect();
    let atoms = (0..rng.gen_range(1..=max_atoms)).map(|_| random_atom(rng, lang, 2 * n)).collect();
    QuantifiedSentence::new(lang.clone(), prefix, atoms).unwrap()
}

/// A random `∀^u ∃^e` sentence.
pub fn random_pi2(rng: &mut StdRng, lang: &Arc<ConstraintLanguage>, u: usize, e: usize, max_atoms: usize) -> QuantifiedSentence {
    let prefix = (0..u + e)
        .map(|i| if i < u { QuantifiedVar::forall(var(i)) } else { QuantifiedVar::exists(var(i)) })
        .collect();
    let atoms = (0..rng.gen_range(1..=max_atoms)).map(|_| random_atom(rng, lang, u + e)).collect();
    QuantifiedSentence::new(lang.clone(), prefix, atoms).unwrap()
}

/// Every quantifier prefix on `1..=5` variables, each with a fixed family of matrices.
pub fn exhaustive_bool_suite() -> Vec<QuantifiedSentence> {
    let lang = bool_lang();
    let mut out = Vec::new();
    for vars in 1..=5usize {
        let v = |i: usize| var(i % vars);
        let matrices: Vec<Vec<Atom>> = vec![
            vec![Atom::new("NOT", [v(0), v(vars - 1)])],
            (0..vars).map(|i| Atom::new("XOR0", [v(i), v(i + 1), v(i + 2)])).collect(),
            (0..vars).map(|i| Atom::new("NOT", [v(i), v(i + 1)])).collect(),
            (0..vars).map(|i| Atom::new("OR", [v(i), v(i + 1)])).collect(),
            (0..vars).map(|i| Atom::new("LEQ", [v(i), v(i + 1)])).collect(),
            vec![Atom::new("XOR0", [v(0), v(1), v(vars - 1)]), Atom::new("OR", [v(vars - 1), v(2)])],
            vec![Atom::new("LEQ", [v(vars - 1), v(0)]), Atom::new("NOT", [v(1), v(2)])],
        ];
        for mask in 0..(1u32 << vars) {
            let prefix: Vec<QuantifiedVar> = (0..vars)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        QuantifiedVar::forall(var(i))
                    } else {
                        QuantifiedVar::exists(var(i))
                    }
                })
                .collect();
            for m in &matrices {
                out.push(QuantifiedSentence::new(lang.clone(), prefix.clone(), m.clone()).unwrap());
            }
        }
    }
    out
}

/// Every alternating sentence over {XOR0} with `n` pairs and at most two atoms.
pub fn exhaustive_xor_alternating(n: usize) -> Vec<QuantifiedSentence> {
    let lang = xor_lang();
    let vars = 2 * n;
    let prefix: Vec<QuantifiedVar> = (0..vars)
        .map(|i| if i % 2 == 0 { QuantifiedVar::exists(var(i)) } else { QuantifiedVar::forall(var(i)) })
        .collect();
    let atoms: Vec<Atom> = (0..vars.pow(3))
        .map(|c| Atom::new("XOR0", [var(c / (vars * vars)), var(c / vars % vars), var(c % vars)]))
        .collect();
    let mut out = vec![QuantifiedSentence::new(lang.clone(), prefix.clone(), vec![]).unwrap()];
    for i in 0..atoms.len() {
        out.push(QuantifiedSentence::new(lang.clone(), prefix.clone(), vec![atoms[i].clone()]).unwrap());
        for j in i + 1..atoms.len() {
            let m = vec![atoms[i].clone(), atoms[j].clone()];
            out.push(QuantifiedSentence::new(lang.clone(), prefix.clone(), m).unwrap());
        }
    }
    out
}

/// Truth by enumerating every assignment along the prefix.
pub fn brute_truth(s: &QuantifiedSentence) -> bool {
    let lang = s.language();
    let names: Vec<&str> = s.prefix().iter().map(|q| q.var.as_str()).collect();
    let atoms: Vec<(&Relation, Vec<usize>)> = s
        .matrix()
        .iter()
        .map(|a| {
            let rel = lang.get(&a.relation).expect("known relation");
            let args = a.args.iter().map(|v| names.iter().position(|n| n == v).expect("bound")).collect();
            (rel, args)
        })
        .collect();
    let mut values = vec![0; names.len()];
    eval(s.prefix(), 0, lang.domain().size(), &atoms, &mut values)
}

fn eval(prefix: &[QuantifiedVar], at: usize, size: u32, atoms: &[(&Relation, Vec<usize>)], values: &mut [Element]) -> bool {
    if at == prefix.len() {
        return atoms
            .iter()
            .all(|(r, args)| r.contains(&args.iter().map(|&i| values[i]).collect::<Vec<_>>()));
    }
    let branch = |a: Element, values: &mut [Element]| {
        values[at] = a;
        eval(prefix, at + 1, size, atoms, values)
    };
    match prefix[at].quantifier {
        Quantifier::Forall => (0..size).all(|a| branch(a, values)),
        Quantifier::Exists => (0..size).any(|a| branch(a, values)),
    }
}

pub fn brute_csp(inst: &CspInstance) -> bool {
    brute_truth(&inst.to_sentence())
}

/// Naive closure: apply every operation to every argument choice until nothing new appears.
pub fn naive_closure(seeds: &[ValueTuple], ops: &[qcsp::algebra::OperationTable]) -> BTreeSet<ValueTuple> {
    let mut set: BTreeSet<ValueTuple> = seeds.iter().cloned().collect();
    loop {
        let current: Vec<ValueTuple> = set.iter().cloned().collect();
        if current.is_empty() {
            return set;
        }
        let mut grew = false;
        for op in ops {
            let m = op.arity();
            let mut pick = vec![0usize; m];
            loop {
                let rows: Vec<&[Element]> = pick.iter().map(|&i| current[i].as_slice()).collect();
                let n = rows.first().map_or(0, |r| r.len());
                let t: ValueTuple = (0..n).map(|c| op.apply(&rows.iter().map(|r| r[c]).collect::<Vec<_>>())).collect();
                grew |= set.insert(t);
                let mut i = 0;
                while i < m {
                    pick[i] += 1;
                    if pick[i] < current.len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
                if i == m {
                    break;
                }
            }
        }
        if !grew {
            return set;
        }
    }
}

/// Coordinatewise x - y + z on {0,1}, i.e. x + y + z mod 2.
pub fn minority() -> qcsp::algebra::OperationTable {
    qcsp::algebra::OperationTable::from_fn(DomainSpec::new(2).unwrap(), 3, |a| (a[0] + a[1] + a[2]) % 2).unwrap()
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
