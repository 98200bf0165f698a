use std::collections::HashMap;

use crate::automata::{Dfa, Transformation};
use crate::error::{Error, Result};

/// A set of 0-based NFA state indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateSet {
    words: Vec<u64>,
}

impl StateSet {
    pub fn new(capacity: usize) -> Self {
        Self {
            words: vec![0; capacity.div_ceil(64).max(1)],
        }
    }

    pub fn singleton(capacity: usize, q: usize) -> Self {
        let mut s = Self::new(capacity);
        s.insert(q);
        s
    }

    pub fn insert(&mut self, q: usize) {
        self.words[q / 64] |= 1 << (q % 64);
    }

    pub fn contains(&self, q: usize) -> bool {
        self.words
            .get(q / 64)
            .is_some_and(|w| w >> (q % 64) & 1 == 1)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// 0-based members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + b)
            })
        })
    }

    /// 1-based members in increasing order.
    pub fn states(&self) -> Vec<usize> {
        self.iter().map(|q| q + 1).collect()
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }
}

/// A nondeterministic finite automaton with a single initial state and no
/// epsilon moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Vec<String>,
    /// `delta[q][a]`: sorted, deduplicated 0-based successors.
    delta: Vec<Vec<Vec<u32>>>,
    initial: usize,
    finals: Vec<bool>,
}

impl Nfa {
    /// `transitions` holds `(from, letter index, to)` with 1-based states.
    pub fn new(
        state_count: usize,
        alphabet: Vec<String>,
        transitions: &[(usize, usize, usize)],
        initial: usize,
        finals: &[usize],
    ) -> Result<Self> {
        if state_count == 0 {
            return Err(Error::invalid("an NFA needs at least one state"));
        }
        let k = alphabet.len();
        let in_range = |q: usize| q >= 1 && q <= state_count;
        if !in_range(initial) {
            return Err(Error::invalid(format!(
                "initial state {initial} out of range"
            )));
        }
        let mut delta = vec![vec![Vec::new(); k]; state_count];
        for &(p, a, q) in transitions {
            if !in_range(p) || !in_range(q) || a >= k {
                return Err(Error::invalid(format!(
                    "transition ({p}, {a}, {q}) out of range"
                )));
            }
            delta[p - 1][a].push((q - 1) as u32);
        }
        for row in &mut delta {
            for succ in row {
                succ.sort_unstable();
                succ.dedup();
            }
        }
        let mut fin = vec![false; state_count];
        for &f in finals {
            if !in_range(f) {
                return Err(Error::invalid(format!("final state {f} out of range")));
            }
            fin[f - 1] = true;
        }
        Ok(Self {
            alphabet,
            delta,
            initial: initial - 1,
            finals: fin,
        })
    }

    pub(crate) fn from_parts(
        alphabet: Vec<String>,
        delta: Vec<Vec<Vec<u32>>>,
        initial: usize,
        finals: Vec<bool>,
    ) -> Self {
        Self {
            alphabet,
            delta,
            initial,
            finals,
        }
    }

    pub fn from_dfa(d: &Dfa) -> Self {
        let delta = (0..d.state_count())
            .map(|q| {
                (0..d.letter_count())
                    .map(|a| vec![d.step_index(q, a) as u32])
                    .collect()
            })
            .collect();
        Self::from_parts(
            d.alphabet().to_vec(),
            delta,
            d.initial_index(),
            d.final_flags().to_vec(),
        )
    }

    pub fn state_count(&self) -> usize {
        self.finals.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn letter_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn initial_index(&self) -> usize {
        self.initial
    }

    pub fn is_final_index(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn final_indices(&self) -> Vec<usize> {
        self.finals
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(q, _)| q)
            .collect()
    }

    /// 0-based successors of the 0-based state `q` on letter `a`.
    pub fn successors_index(&self, q: usize, a: usize) -> &[u32] {
        &self.delta[q][a]
    }

    /// Image of a set of states under one letter.
    pub fn step_set(&self, set: &StateSet, a: usize) -> StateSet {
        let mut out = StateSet::new(self.state_count());
        for q in set.iter() {
            for &r in &self.delta[q][a] {
                out.insert(r as usize);
            }
        }
        out
    }

    pub fn final_set(&self) -> StateSet {
        let mut s = StateSet::new(self.state_count());
        for q in self.final_indices() {
            s.insert(q);
        }
        s
    }

    /// True when some word is accepted from `set`, i.e. `set·w ∩ F ≠ ∅`.
    pub fn accepts_from(&self, set: &StateSet, word: &[usize]) -> bool {
        let end = word.iter().fold(set.clone(), |s, &a| self.step_set(&s, a));
        end.intersects(&self.final_set())
    }

    /// Accessible subset automaton. State `i` of the returned DFA corresponds
    /// to `subsets[i]`; state 1 is `{initial}`. States are numbered in BFS
    /// order with letters tried in alphabet order.
    pub fn determinize(&self) -> SubsetAutomaton {
        let n = self.state_count();
        let k = self.letter_count();
        let start = StateSet::singleton(n, self.initial);
        let mut ids: HashMap<StateSet, u32> = HashMap::from([(start.clone(), 0)]);
        let mut subsets = vec![start];
        let mut table: Vec<Vec<u32>> = vec![Vec::new(); k];
        let mut head = 0;
        while head < subsets.len() {
            let cur = subsets[head].clone();
            head += 1;
            for (a, col) in table.iter_mut().enumerate() {
                let next = self.step_set(&cur, a);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len() as u32;
                        ids.insert(next.clone(), id);
                        subsets.push(next);
                        id
                    }
                };
                col.push(id);
            }
        }
        let fin = self.final_set();
        let finals = subsets.iter().map(|s| s.intersects(&fin)).collect();
        let delta = table
            .into_iter()
            .map(Transformation::from_indices)
            .collect();
        SubsetAutomaton {
            dfa: Dfa::from_parts(self.alphabet.clone(), delta, 0, finals),
            subsets,
        }
    }
}

/// Result of the subset construction.
#[derive(Clone, Debug)]
pub struct SubsetAutomaton {
    pub dfa: Dfa,
    pub subsets: Vec<StateSet>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Automaton;

    #[test]
    fn two_state_nfa_has_two_subsets() {
        // δ(1,a) = {1,2}, F = {2}
        let nfa = Nfa::new(2, vec!["a".into()], &[(1, 0, 1), (1, 0, 2)], 1, &[2]).unwrap();
        let det = nfa.determinize();
        assert_eq!(det.dfa.state_count(), 2);
        assert_eq!(det.subsets[0].states(), vec![1]);
        assert_eq!(det.subsets[1].states(), vec![1, 2]);
        assert!(!det.dfa.accepts(&[]));
        assert!(det.dfa.accepts(&[0]));
        assert!(nfa.accepts(&[0, 0]));
    }

    #[test]
    fn deterministic_nfa_gives_isomorphic_dfa() {
        let d = Dfa::new(
            vec!["a".into(), "b".into()],
            vec![
                Transformation::new(&[2, 3, 1]).unwrap(),
                Transformation::new(&[1, 1, 3]).unwrap(),
            ],
            1,
            &[3],
        )
        .unwrap();
        let det = Nfa::from_dfa(&d).determinize();
        assert_eq!(det.dfa.state_count(), 3);
        assert_eq!(
            crate::automata::canonicalize(&det.dfa),
            crate::automata::canonicalize(&d)
        );
    }

    #[test]
    fn dead_subset_is_kept() {
        // a leads nowhere from state 1
        let nfa = Nfa::new(1, vec!["a".into()], &[], 1, &[1]).unwrap();
        let det = nfa.determinize();
        assert_eq!(det.dfa.state_count(), 2);
        assert!(det.subsets[1].is_empty());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Nfa::new(2, vec!["a".into()], &[(1, 0, 3)], 1, &[]).is_err());
        assert!(Nfa::new(2, vec!["a".into()], &[(1, 1, 2)], 1, &[]).is_err());
        assert!(Nfa::new(2, vec!["a".into()], &[], 0, &[]).is_err());
    }

    #[test]
    fn state_set_basics() {
        let mut s = StateSet::new(130);
        s.insert(0);
        s.insert(129);
        assert_eq!(s.len(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 129]);
        assert!(s.contains(129));
        assert!(!s.contains(64));
    }
}
