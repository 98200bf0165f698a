//! Distinguishability of NFA states: unique in-transitions, uniquely
//! distinguishable states, and the ternary witness family whose shuffle
//! NFA has no equivalent subsets.
//!
//! A state `q` is uniquely distinguishable when some word is accepted from
//! `q` and from no other state. If every state is, any two distinct subsets
//! differ on such a word, so the subset automaton has no equivalent states.
//! If `q` is uniquely distinguishable and `p` is the only state entering
//! `q` on `a`, then `p` is uniquely distinguishable too (prefix `a`).

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automata::{Dfa, Nfa, StateSet, Transformation};
use crate::error::{Error, Result};

/// Largest NFA handled by the exhaustive subset oracle.
pub const BRUTE_STATE_GUARD: usize = 12;

/// An edge `(from, letter, to)` where `from` is the only state whose
/// successors on `letter` include `to`. States and letters are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UniqueInEdge {
    pub from: usize,
    pub letter: usize,
    pub to: usize,
}

/// All unique in-transitions, ordered by letter, then target.
pub fn unique_in_subgraph(a: &Nfa) -> Vec<UniqueInEdge> {
    let states = a.state_count();
    let mut out = Vec::new();
    for letter in 0..a.letter_count() {
        // number of predecessors of each state, and the last one seen
        let mut count = vec![0u32; states];
        let mut last = vec![0usize; states];
        for p in 0..states {
            for &q in a.successors_index(p, letter) {
                count[q as usize] += 1;
                last[q as usize] = p;
            }
        }
        for to in 0..states {
            if count[to] == 1 {
                out.push(UniqueInEdge {
                    from: last[to],
                    letter,
                    to,
                });
            }
        }
    }
    out
}

/// States proven uniquely distinguishable: the single final state (the
/// empty word singles it out), closed backwards along unique
/// in-transitions. Empty unless there is exactly one final state. The
/// result is sound, not complete.
pub fn uniquely_distinguishable(a: &Nfa) -> StateSet {
    let states = a.state_count();
    let mut closed = StateSet::new(states);
    let finals = a.final_indices();
    if finals.len() != 1 {
        return closed;
    }
    let mut into: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in unique_in_subgraph(a) {
        into.entry(e.to).or_default().push(e.from);
    }
    let mut stack = vec![finals[0]];
    closed.insert(finals[0]);
    while let Some(q) = stack.pop() {
        for &p in into.get(&q).map_or(&[][..], Vec::as_slice) {
            if !closed.contains(p) {
                closed.insert(p);
                stack.push(p);
            }
        }
    }
    closed
}

/// Sufficient condition for all subsets to be pairwise inequivalent: every
/// state is uniquely distinguishable.
pub fn subsets_pairwise_distinct(a: &Nfa) -> bool {
    uniquely_distinguishable(a).len() == a.state_count()
}

/// Number of equivalence classes among all `2^N` subsets of the NFA's
/// states (reachable or not), by Moore partition refinement on the full
/// subset automaton.
pub fn subset_equivalence_classes(a: &Nfa) -> Result<usize> {
    let states = a.state_count();
    if states > BRUTE_STATE_GUARD {
        return Err(Error::guard(
            "NFA states for the subset oracle",
            BRUTE_STATE_GUARD as u128,
            states as u128,
        ));
    }
    let size = 1usize << states;
    let k = a.letter_count();
    let succ_mask: Vec<Vec<usize>> = (0..states)
        .map(|p| {
            (0..k)
                .map(|x| a.successors_index(p, x).iter().fold(0, |m, &q| m | 1 << q))
                .collect()
        })
        .collect();
    let final_mask = a.final_indices().iter().fold(0usize, |m, &q| m | 1 << q);
    // delta[s * k + x]: image of subset s under letter x
    let delta: Vec<usize> = (0..size)
        .into_par_iter()
        .flat_map_iter(|s| {
            let succ_mask = &succ_mask;
            (0..k).map(move |x| {
                (0..states)
                    .filter(|&p| s >> p & 1 == 1)
                    .fold(0, |m, p| m | succ_mask[p][x])
            })
        })
        .collect();
    let mut class: Vec<usize> = (0..size)
        .map(|s| usize::from(s & final_mask != 0))
        .collect();
    let mut count = class.iter().copied().max().map_or(0, |c| c + 1);
    loop {
        let signatures: Vec<Vec<usize>> = (0..size)
            .into_par_iter()
            .map(|s| {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[s]);
                sig.extend((0..k).map(|x| class[delta[s * k + x]]));
                sig
            })
            .collect();
        let mut ids: HashMap<&[usize], usize> = HashMap::new();
        let next: Vec<usize> = signatures
            .iter()
            .map(|sig| {
                let id = ids.len();
                *ids.entry(sig.as_slice()).or_insert(id)
            })
            .collect();
        let next_count = ids.len();
        class = next;
        if next_count == count {
            return Ok(count);
        }
        count = next_count;
    }
}

/// Exhaustive oracle: all `2^N` subsets are pairwise inequivalent.
pub fn brute_subsets_pairwise_distinct(a: &Nfa) -> Result<bool> {
    Ok(subset_equivalence_classes(a)? == 1usize << a.state_count())
}

/// The ternary witness pair over `{a, b, c}`:
/// `K`: `a` shifts `i → i+1` cyclically, `b` resets to 1, `c` sends 1 to 2
/// and everything else to 1, final `{m}`;
/// `L`: `a` resets to 1, `b` shifts cyclically, `c` jumps to `n`, final `{n}`.
pub fn ternary_witness(m: usize, n: usize) -> Result<(Dfa, Dfa)> {
    if m < 2 || n < 2 {
        return Err(Error::invalid(format!(
            "ternary_witness needs m, n >= 2 (got {m}, {n})"
        )));
    }
    let alphabet: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let k_c: Vec<usize> = (1..=m).map(|i| if i == 1 { 2 } else { 1 }).collect();
    let k = Dfa::new(
        alphabet.clone(),
        vec![
            Transformation::cycle(m),
            Transformation::constant(m, 1),
            Transformation::new(&k_c)?,
        ],
        1,
        &[m],
    )?;
    let l = Dfa::new(
        alphabet,
        vec![
            Transformation::constant(n, 1),
            Transformation::cycle(n),
            Transformation::constant(n, n),
        ],
        1,
        &[n],
    )?;
    Ok((k, l))
}
