mod common;

use std::sync::Arc;

use common::*;
use proptest::prelude::*;
use qcsp::algebra::{generate_closure, switchability_witness, Execution, WitnessConfig};
use qcsp::budget::Budgets;
use qcsp::model::{enumerate_switch_bounded, switch_count, CspInstance, DomainSpec, QuantifiedSentence};
use qcsp::solvers::{oracle_qcsp, reduce_pgp_to_csp, solve_csp, ReductionOptions};
use qcsp::transforms::{
    eliminate_universals, index_sets, move_universals_left, normalize_alternating, omega, power_csp_to_qcsp,
    qcsp_to_power_csp, reduce_universal_count, zeta,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn oracle(s: &QuantifiedSentence) -> bool {
    oracle_qcsp(s, &Budgets::default()).unwrap().truth
}

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn bool_sentence(seed: u64, vars: usize, atoms: usize) -> QuantifiedSentence {
    random_sentence(&mut rng(seed), &bool_lang(), vars, atoms)
}

fn three_sentence(seed: u64) -> QuantifiedSentence {
    let mut r = rng(seed);
    let lang = random_lang3(&mut r);
    random_sentence(&mut r, &lang, 4, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_matches_enumeration(seed in any::<u64>()) {
        let s = bool_sentence(seed, 7, 6);
        prop_assert_eq!(oracle(&s), brute_truth(&s));
        let s = three_sentence(seed);
        prop_assert_eq!(oracle(&s), brute_truth(&s));
    }

    #[test]
    fn oracle_on_existential_sentences_is_csp(seed in any::<u64>()) {
        let s = bool_sentence(seed, 8, 8);
        let (lang, prefix, matrix) = s.into_parts();
        let vars: Vec<String> = prefix.into_iter().map(|q| q.var).collect();
        let inst = CspInstance::new(lang, vars, matrix).unwrap();
        let csp = solve_csp(&inst, &Budgets::default()).unwrap();
        prop_assert_eq!(oracle(&inst.to_sentence()), csp.truth);
    }

    #[test]
    fn csp_agrees_with_enumeration(seed in any::<u64>(), vars in 1usize..=12, atoms in 1usize..=14) {
        let mut r = rng(seed);
        let lang = bool_lang();
        let names: Vec<String> = (0..vars).map(|i| format!("v{i}")).collect();
        let matrix = (0..atoms).map(|_| random_atom(&mut r, &lang, vars)).collect();
        let inst = CspInstance::new(lang, names, matrix).unwrap();
        let v = solve_csp(&inst, &Budgets::default()).unwrap();
        prop_assert_eq!(v.truth, brute_csp(&inst));
        if let Some(w) = v.witness {
            for a in inst.atoms() {
                let t: Vec<u32> = a.args.iter().map(|x| w[x]).collect();
                prop_assert!(inst.language().get(&a.relation).unwrap().contains(&t));
            }
        }
    }

    #[test]
    fn universal_removal_preserves_truth(seed in any::<u64>()) {
        for s in [bool_sentence(seed, 5, 5), three_sentence(seed)] {
            let inst = eliminate_universals(&s, &Budgets::default()).unwrap();
            prop_assert_eq!(inst.to_sentence().universal_count(), 0);
            prop_assert_eq!(solve_csp(&inst, &Budgets::default()).unwrap().truth, brute_truth(&s));
        }
    }

    #[test]
    fn moving_left_and_count_reduction_preserve_truth(seed in any::<u64>()) {
        for s in [bool_sentence(seed, 5, 4), three_sentence(seed)] {
            let expected = brute_truth(&s);
            let left = move_universals_left(&s, &Budgets::default()).unwrap();
            prop_assert!(left.is_pi2());
            prop_assert_eq!(oracle(&left), expected);
            if let Ok(small) = reduce_universal_count(&left, &Budgets::default()) {
                prop_assert!(small.universal_count() <= s.language().domain().size() as usize);
                prop_assert_eq!(oracle(&small), expected);
            }
        }
    }

    #[test]
    fn zeta_preserves_truth(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let s = random_alternating(&mut r, &bool_lang(), n, 4);
        prop_assert_eq!(oracle(&zeta(&normalize_alternating(&s), &Budgets::default()).unwrap()), brute_truth(&s));
        let lang = random_lang3(&mut r);
        let s = random_alternating(&mut r, &lang, n, 3);
        prop_assert_eq!(oracle(&zeta(&normalize_alternating(&s), &Budgets::default()).unwrap()), brute_truth(&s));
    }

    #[test]
    fn omega_weakens_and_counts_universals(seed in any::<u64>()) {
        let s = bool_sentence(seed, 6, 5);
        let truth = brute_truth(&s);
        let alt = normalize_alternating(&s);
        prop_assert_eq!(brute_truth(alt.sentence()), truth);
        for set in index_sets(alt.n(), alt.n()) {
            let w = omega(&alt, &set).unwrap();
            prop_assert_eq!(w.universal_count(), 2 * set.len() + 1);
            if truth {
                prop_assert!(oracle(&w));
            }
        }
    }

    #[test]
    fn power_round_trip(seed in any::<u64>(), u in 0usize..=2, e in 1usize..=3) {
        let base = bool_lang();
        let s = random_pi2(&mut rng(seed), &base, u, e, 5);
        let inst = qcsp_to_power_csp(&s, &Budgets::default()).unwrap();
        let truth = brute_truth(&s);
        prop_assert_eq!(solve_csp(&inst, &Budgets::default()).unwrap().truth, truth);
        let back = power_csp_to_qcsp(&inst, &base, &Budgets::default()).unwrap();
        prop_assert_eq!(brute_truth(back.sentence().unwrap()), truth);
    }

    #[test]
    fn bundle_is_conjunction_and_schedule_free(seed in any::<u64>()) {
        let lang = xor_lang();
        let w = switchability_witness(&lang, WitnessConfig::default(), &Budgets::default()).unwrap();
        let s = random_sentence(&mut rng(seed), &lang, 6, 5);
        let opts = ReductionOptions::new(2, Some(&w));
        let b = reduce_pgp_to_csp(&s, opts, &Budgets::default()).unwrap();
        prop_assert_eq!(b.combined, b.members.iter().all(|m| m.satisfiable));
        prop_assert_eq!(b.combined, brute_truth(&s));
        for m in &b.members {
            prop_assert_eq!(m.satisfiable, brute_truth(&m.omega));
        }
        let p = reduce_pgp_to_csp(&s, opts.with_exec(Execution::Parallel), &Budgets::default()).unwrap();
        prop_assert_eq!(serde_json::to_string(&p).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn closure_is_a_closure_operator(seed in any::<u64>(), n in 1usize..=5) {
        use rand::Rng;
        let mut r = rng(seed);
        let d = DomainSpec::new(2).unwrap();
        let ops = [minority()];
        let all = tuples(d, n);
        let big: Vec<_> = all.iter().filter(|_| r.gen_bool(0.3)).cloned().collect();
        let small: Vec<_> = big.iter().filter(|_| r.gen_bool(0.5)).cloned().collect();
        let b = Budgets::default();
        let cs = generate_closure(d, &small, &ops, n, &b).unwrap();
        let cb = generate_closure(d, &big, &ops, n, &b).unwrap();
        prop_assert!(small.iter().all(|t| cs.contains(t)));
        prop_assert!(cs.is_subset(&cb));
        let again: Vec<_> = cs.iter().cloned().collect();
        prop_assert_eq!(&generate_closure(d, &again, &ops, n, &b).unwrap(), &cs);
        prop_assert_eq!(cs, naive_closure(&small, &ops));
    }

    #[test]
    fn switch_bounded_tuples_are_exactly_those_within_bound(size in 1u32..=3, n in 1usize..=6, k in 0usize..=6) {
        let d = DomainSpec::new(size).unwrap();
        let expected: Vec<_> = tuples(d, n).into_iter().filter(|t| switch_count(t) <= k).collect();
        prop_assert_eq!(enumerate_switch_bounded(n, k, d), expected);
    }
}

#[test]
fn reductions_agree_on_a_three_element_language() {
    // with r at least the number of pairs the bundle contains the input itself,
    // so it is exact even without switchability
    let mut r = rng(11);
    for _ in 0..40 {
        let lang: Arc<_> = random_lang3(&mut r);
        let s = random_sentence(&mut r, &lang, 3, 3);
        let b = reduce_pgp_to_csp(&s, ReductionOptions::overridden(3), &Budgets::default()).unwrap();
        assert!(b.conditional);
        assert_eq!(b.combined, brute_truth(&s), "{s}");
    }
}
