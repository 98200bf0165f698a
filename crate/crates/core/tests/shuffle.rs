mod common;

use num_bigint::BigUint;
use rand::Rng;
use ssc_core::automata::{minimize, state_complexity, Automaton, Dfa};
use ssc_core::shuffle::{
    bound_f, build_shuffle_nfa, ideal_bound, okhotin_witness, shuffle_state_complexity,
    shuffle_state_complexity_generic, ProductSubset,
};

use common::{fixture, random_dfa, rng};

#[test]
fn two_by_two_witness_reaches_ten() {
    let (k, l) = (fixture("fig1_k.json"), fixture("fig1_l.json"));
    assert_eq!(state_complexity(&k), 2);
    assert_eq!(state_complexity(&l), 2);
    let nfa = build_shuffle_nfa(&k, &l).unwrap();
    assert_eq!(nfa.nfa().state_count(), 4);
    let det = nfa.nfa().determinize();
    assert!(det.dfa.state_count() >= 10);
    assert_eq!(minimize(&det.dfa).state_count(), 10);
    assert_eq!(shuffle_state_complexity(&k, &l).unwrap(), 10);
    assert_eq!(shuffle_state_complexity_generic(&k, &l).unwrap(), 10);
}

#[test]
fn two_by_three_witness_reaches_forty_four() {
    let (k, l) = (fixture("ex1b_k.json"), fixture("ex1b_l.json"));
    assert_eq!(state_complexity(&k), 2);
    assert_eq!(state_complexity(&l), 3);
    assert_eq!(shuffle_state_complexity(&k, &l).unwrap(), 44);
    assert_eq!(BigUint::from(44u32), bound_f(2, 3).unwrap());
}

#[test]
fn universal_shuffle_meets_ideal_bound() {
    for n in 3..=7 {
        let l = okhotin_witness(n).unwrap();
        let names: Vec<&str> = l.alphabet().iter().map(String::as_str).collect();
        let sigma_star = Dfa::universal(&names);
        let kappa = shuffle_state_complexity(&sigma_star, &l).unwrap();
        assert_eq!(BigUint::from(kappa), ideal_bound(n).unwrap(), "n = {n}");
    }
}

/// Random pairs: reachable subsets are valid, projections only grow, the
/// bound holds and the operation is commutative.
#[test]
fn random_pair_properties() {
    let mut rng = rng();
    for _ in 0..120 {
        let (m, n, k) = (
            rng.gen_range(1..=4),
            rng.gen_range(1..=4),
            rng.gen_range(1..=3),
        );
        let a = random_dfa(&mut rng, m, k);
        let b = random_dfa(&mut rng, n, k);
        let nfa = build_shuffle_nfa(&a, &b).unwrap();
        let (dfa, subsets) = nfa.subset_automaton().unwrap();
        for (i, s) in subsets.iter().enumerate() {
            assert!(s.is_valid(), "{s} reachable but invalid");
            let (rows, cols) = s.projections();
            for x in 0..k {
                let t: &ProductSubset = &subsets[dfa.step_index(i, x)];
                let (rows2, cols2) = t.projections();
                assert!(rows.iter().all(|r| rows2.contains(r)));
                assert!(cols.iter().all(|c| cols2.contains(c)));
            }
        }
        let kappa = shuffle_state_complexity(&a, &b).unwrap();
        let (ka, kb) = (state_complexity(&a), state_complexity(&b));
        assert!(BigUint::from(kappa) <= bound_f(ka, kb).unwrap());
        assert_eq!(kappa, shuffle_state_complexity(&b, &a).unwrap());
        assert_eq!(kappa, shuffle_state_complexity_generic(&a, &b).unwrap());
    }
}

/// The shuffle NFA accepts exactly the interleavings: checked against a
/// direct recursive definition on short words.
#[test]
fn shuffle_nfa_matches_interleaving_definition() {
    fn in_shuffle(a: &Dfa, b: &Dfa, w: &[usize], p: usize, q: usize) -> bool {
        match w.split_first() {
            None => a.is_final_index(p) && b.is_final_index(q),
            Some((&x, rest)) => {
                in_shuffle(a, b, rest, a.step_index(p, x), q)
                    || in_shuffle(a, b, rest, p, b.step_index(q, x))
            }
        }
    }
    let mut rng = rng();
    for _ in 0..40 {
        let (m, n) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let a = random_dfa(&mut rng, m, 2);
        let b = random_dfa(&mut rng, n, 2);
        let nfa = build_shuffle_nfa(&a, &b).unwrap();
        for _ in 0..50 {
            let w: Vec<usize> = (0..rng.gen_range(0..7))
                .map(|_| rng.gen_range(0..2))
                .collect();
            assert_eq!(nfa.nfa().accepts(&w), in_shuffle(&a, &b, &w, 0, 0));
        }
    }
}
