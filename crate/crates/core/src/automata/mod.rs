//! Transformations, complete DFAs, NFAs and the standard algorithms on them.

mod canonical;
mod dfa;
mod io;
mod minimize;
mod nfa;
mod transformation;

pub use canonical::{
    canonicalize, canonicalize_fixed_letters, isomorphic, CanonicalForm, MAX_CANONICAL_LETTERS,
};
pub(crate) use dfa::letters_to_indices;
pub use dfa::Dfa;
pub use io::{dfa_from_value, dfa_to_json, dfa_to_value, parse_dfa};
pub use minimize::{minimize, state_complexity};
pub use nfa::{Nfa, StateSet, SubsetAutomaton};
pub use transformation::{all_permutations, monoid_size, AllTransformations, Transformation};

/// Word membership over letter indices.
pub trait Automaton {
    fn alphabet(&self) -> &[String];

    fn accepts(&self, word: &[usize]) -> bool;

    /// Membership for a word given as letter names.
    fn accepts_names(&self, word: &[&str]) -> crate::Result<bool> {
        Ok(self.accepts(&letters_to_indices(self.alphabet(), word)?))
    }
}

impl Automaton for Dfa {
    fn alphabet(&self) -> &[String] {
        Dfa::alphabet(self)
    }

    fn accepts(&self, word: &[usize]) -> bool {
        self.is_final_index(self.run_from(self.initial_index(), word))
    }
}

impl Automaton for Nfa {
    fn alphabet(&self) -> &[String] {
        Nfa::alphabet(self)
    }

    fn accepts(&self, word: &[usize]) -> bool {
        let start = StateSet::singleton(self.state_count(), self.initial_index());
        self.accepts_from(&start, word)
    }
}

#[cfg(test)]
mod property_tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_dfa(max_states: usize, letters: usize) -> impl Strategy<Value = Dfa> {
        (1..=max_states).prop_flat_map(move |n| {
            (
                prop::collection::vec(prop::collection::vec(1..=n, n), letters),
                prop::collection::vec(any::<bool>(), n),
            )
                .prop_map(move |(rows, fin)| {
                    let delta = rows
                        .iter()
                        .map(|r| Transformation::new(r).unwrap())
                        .collect();
                    let finals: Vec<usize> = fin
                        .iter()
                        .enumerate()
                        .filter(|(_, &f)| f)
                        .map(|(q, _)| q + 1)
                        .collect();
                    let alphabet = (0..letters).map(|i| format!("l{i}")).collect();
                    Dfa::new(alphabet, delta, 1, &finals).unwrap()
                })
        })
    }

    fn arb_nfa(max_states: usize, letters: usize) -> impl Strategy<Value = Nfa> {
        (1..=max_states).prop_flat_map(move |n| {
            (
                prop::collection::vec((1..=n, 0..letters, 1..=n), 0..3 * n * letters),
                prop::collection::vec(1..=n, 0..=n),
            )
                .prop_map(move |(tr, fin)| {
                    let alphabet = (0..letters).map(|i| format!("l{i}")).collect();
                    Nfa::new(n, alphabet, &tr, 1, &fin).unwrap()
                })
        })
    }

    fn words(letters: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
        prop::collection::vec(prop::collection::vec(0..letters, 0..8), 200)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn determinize_preserves_language(nfa in arb_nfa(6, 2), ws in words(2)) {
            let det = nfa.determinize();
            for w in &ws {
                prop_assert_eq!(nfa.accepts(w), det.dfa.accepts(w));
            }
        }

        #[test]
        fn minimize_preserves_language(d in arb_dfa(6, 2), ws in words(2)) {
            let min = minimize(&d);
            prop_assert_eq!(minimize(&min).state_count(), min.state_count());
            prop_assert_eq!(state_complexity(&d), min.state_count());
            for w in &ws {
                prop_assert_eq!(d.accepts(w), min.accepts(w));
            }
        }

        #[test]
        fn canonical_form_is_relabeling_invariant(
            d in arb_dfa(5, 3),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = d.state_count();
            // random state relabeling that keeps the initial state first
            let mut perm: Vec<usize> = (1..n).collect();
            perm.shuffle(&mut rng);
            perm.insert(0, 0);
            let mut inv = vec![0u32; n];
            for (new, &old) in perm.iter().enumerate() {
                inv[old] = new as u32;
            }
            let mut letters: Vec<usize> = (0..d.letter_count()).collect();
            letters.shuffle(&mut rng);
            let delta = letters
                .iter()
                .map(|&a| {
                    Transformation::from_indices(
                        perm.iter().map(|&old| inv[d.step_index(old, a)]).collect(),
                    )
                })
                .collect();
            let finals: Vec<usize> = (0..n).filter(|&q| d.is_final_index(perm[q])).map(|q| q + 1).collect();
            let e = Dfa::new(d.alphabet().to_vec(), delta, 1, &finals).unwrap();
            prop_assert_eq!(canonicalize(&d), canonicalize(&e));
        }

        #[test]
        fn different_minimal_languages_have_different_forms(a in arb_dfa(4, 2), b in arb_dfa(4, 2)) {
            let (ma, mb) = (minimize(&a), minimize(&b));
            if canonicalize(&ma) == canonicalize(&mb) {
                // isomorphic up to letter renaming: some letter swap makes them equivalent
                let swapped = mb.reorder_alphabet(&[mb.alphabet()[1].clone(), mb.alphabet()[0].clone()])
                    .unwrap()
                    .with_alphabet(mb.alphabet().to_vec())
                    .unwrap();
                prop_assert!(ma.equivalent(&mb) || ma.equivalent(&swapped));
            }
        }

        #[test]
        fn composition_matches_sequential_application(
            s in prop::collection::vec(1usize..=6, 6),
            t in prop::collection::vec(1usize..=6, 6),
            q in 1usize..=6,
        ) {
            let (s, t) = (Transformation::new(&s).unwrap(), Transformation::new(&t).unwrap());
            prop_assert_eq!(s.then(&t).apply(q), t.apply(s.apply(q)));
        }
    }
}
