use crate::automata::Automaton;
use std::collections::VecDeque;

use crate::automata::Transformation;
use crate::error::{Error, Result};

/// A complete deterministic finite automaton.
///
/// Every letter acts as a [`Transformation`] of the state set, so completeness
/// holds by construction. States are `1..=state_count` at the API boundary.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dfa {
    alphabet: Vec<String>,
    delta: Vec<Transformation>,
    initial: usize,
    finals: Vec<bool>,
}

impl Dfa {
    /// `initial` and `finals` are 1-based state ids.
    pub fn new(
        alphabet: Vec<String>,
        delta: Vec<Transformation>,
        initial: usize,
        finals: &[usize],
    ) -> Result<Self> {
        if alphabet.len() != delta.len() {
            return Err(Error::invalid(format!(
                "{} letters but {} transformations",
                alphabet.len(),
                delta.len()
            )));
        }
        if alphabet.is_empty() {
            return Err(Error::invalid("alphabet must not be empty"));
        }
        let n = delta[0].len();
        if let Some((x, t)) = alphabet.iter().zip(&delta).find(|(_, t)| t.len() != n) {
            return Err(Error::invalid(format!(
                "letter {x:?} acts on {} states, expected {n}",
                t.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = alphabet.iter().find(|x| !seen.insert(x.as_str())) {
            return Err(Error::invalid(format!("duplicate letter {dup:?}")));
        }
        if initial == 0 || initial > n {
            return Err(Error::invalid(format!(
                "initial state {initial} outside 1..={n}"
            )));
        }
        let mut fin = vec![false; n];
        for &f in finals {
            if f == 0 || f > n {
                return Err(Error::invalid(format!("final state {f} outside 1..={n}")));
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

    /// Internal constructor over 0-based data; the caller guarantees consistency.
    pub(crate) fn from_parts(
        alphabet: Vec<String>,
        delta: Vec<Transformation>,
        initial: usize,
        finals: Vec<bool>,
    ) -> Self {
        debug_assert_eq!(alphabet.len(), delta.len());
        debug_assert!(delta.iter().all(|t| t.len() == finals.len()));
        Self {
            alphabet,
            delta,
            initial,
            finals,
        }
    }

    /// Single-state DFA of the empty language over `alphabet`.
    pub fn empty_language(alphabet: &[&str]) -> Self {
        Self::single_state(alphabet, false)
    }

    /// Single-state DFA of `Σ*` over `alphabet`.
    pub fn universal(alphabet: &[&str]) -> Self {
        Self::single_state(alphabet, true)
    }

    fn single_state(alphabet: &[&str], accepting: bool) -> Self {
        Self {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            delta: vec![Transformation::identity(1); alphabet.len()],
            initial: 0,
            finals: vec![accepting],
        }
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

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|x| x == name)
    }

    /// Transformation induced by the letter with index `letter`.
    pub fn delta(&self, letter: usize) -> &Transformation {
        &self.delta[letter]
    }

    pub fn transformations(&self) -> &[Transformation] {
        &self.delta
    }

    /// 1-based initial state.
    pub fn initial(&self) -> usize {
        self.initial + 1
    }

    pub fn initial_index(&self) -> usize {
        self.initial
    }

    /// 1-based final states in increasing order.
    pub fn finals(&self) -> Vec<usize> {
        self.finals
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(q, _)| q + 1)
            .collect()
    }

    pub fn is_final_index(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn final_flags(&self) -> &[bool] {
        &self.finals
    }

    #[inline]
    pub fn step_index(&self, q: usize, letter: usize) -> usize {
        self.delta[letter].apply_index(q)
    }

    /// Runs `word` (letter indices) from the 0-based state `q`.
    pub fn run_from(&self, q: usize, word: &[usize]) -> usize {
        word.iter().fold(q, |q, &a| self.step_index(q, a))
    }

    /// Membership test for a word given as letter names.
    pub fn accepts_word(&self, word: &[&str]) -> Result<bool> {
        let idx = letters_to_indices(&self.alphabet, word)?;
        Ok(self.accepts(&idx))
    }

    /// 0-based indices of states reachable from the initial state, in BFS order.
    pub fn reachable_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.state_count()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            head += 1;
            for t in &self.delta {
                let r = t.apply_index(q);
                if !seen[r] {
                    seen[r] = true;
                    order.push(r);
                }
            }
        }
        order
    }

    /// Removes unreachable states, renumbering in BFS order from the initial state.
    pub fn trim(&self) -> Dfa {
        let order = self.reachable_order();
        self.relabel(&order)
    }

    /// Keeps the states listed in `order` (which must be closed under the
    /// transitions and start with the initial state) in that order.
    pub(crate) fn relabel(&self, order: &[usize]) -> Dfa {
        let mut new_id = vec![u32::MAX; self.state_count()];
        for (i, &q) in order.iter().enumerate() {
            new_id[q] = i as u32;
        }
        let delta = self
            .delta
            .iter()
            .map(|t| {
                Transformation::from_indices(
                    order.iter().map(|&q| new_id[t.apply_index(q)]).collect(),
                )
            })
            .collect();
        let finals = order.iter().map(|&q| self.finals[q]).collect();
        Dfa::from_parts(
            self.alphabet.clone(),
            delta,
            new_id[self.initial] as usize,
            finals,
        )
    }

    /// Same automaton with a different final-state set (1-based ids).
    pub fn with_finals(&self, finals: &[usize]) -> Result<Dfa> {
        Dfa::new(
            self.alphabet.clone(),
            self.delta.clone(),
            self.initial(),
            finals,
        )
    }

    /// Same transitions, letters renamed position-wise.
    pub fn with_alphabet(&self, alphabet: Vec<String>) -> Result<Dfa> {
        Dfa::new(alphabet, self.delta.clone(), self.initial(), &self.finals())
    }

    /// Reorders letters so the alphabet matches `alphabet` (same set of names).
    pub fn reorder_alphabet(&self, alphabet: &[String]) -> Result<Dfa> {
        if alphabet.len() != self.alphabet.len() {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet.clone(),
                right: alphabet.to_vec(),
            });
        }
        let mut delta = Vec::with_capacity(alphabet.len());
        for x in alphabet {
            let i = self
                .letter_index(x)
                .ok_or_else(|| Error::AlphabetMismatch {
                    left: self.alphabet.clone(),
                    right: alphabet.to_vec(),
                })?;
            delta.push(self.delta[i].clone());
        }
        Ok(Dfa::from_parts(
            alphabet.to_vec(),
            delta,
            self.initial,
            self.finals.clone(),
        ))
    }

    /// Language equivalence by a product search for a distinguishing word.
    pub fn equivalent(&self, other: &Dfa) -> bool {
        if self.alphabet.len() != other.alphabet.len() {
            return false;
        }
        let m = other.state_count();
        let mut seen = vec![false; self.state_count() * m];
        let mut queue = VecDeque::from([(self.initial, other.initial)]);
        seen[self.initial * m + other.initial] = true;
        while let Some((p, q)) = queue.pop_front() {
            if self.finals[p] != other.finals[q] {
                return false;
            }
            for a in 0..self.alphabet.len() {
                let (p2, q2) = (self.step_index(p, a), other.step_index(q, a));
                if !std::mem::replace(&mut seen[p2 * m + q2], true) {
                    queue.push_back((p2, q2));
                }
            }
        }
        true
    }
}

pub(crate) fn letters_to_indices(alphabet: &[String], word: &[&str]) -> Result<Vec<usize>> {
    word.iter()
        .map(|x| {
            alphabet
                .iter()
                .position(|y| y == x)
                .ok_or_else(|| Error::invalid(format!("letter {x:?} not in alphabet")))
        })
        .collect()
}
