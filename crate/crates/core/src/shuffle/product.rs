use std::collections::HashMap;

use crate::automata::{state_complexity, Dfa, Nfa, StateSet, Transformation};
use crate::error::{Error, Result};
use crate::shuffle::subset::{iter_bits, ProductSubset, MAX_GRID_CELLS};

/// The product NFA recognizing `L(K) ⧢ L(L)`.
///
/// Product state `(p, q)` has 0-based index `(p−1)·n + (q−1)`, the same
/// layout as [`ProductSubset`].
#[derive(Clone, Debug)]
pub struct ShuffleNfa {
    left: Dfa,
    right: Dfa,
    nfa: Nfa,
}

/// Builds the shuffle NFA. The right DFA's letters are reordered to match
/// the left alphabet when both use the same letter set in different orders.
pub fn build_shuffle_nfa(k: &Dfa, l: &Dfa) -> Result<ShuffleNfa> {
    let right = aligned_right(k, l)?;
    let (m, n) = (k.state_count(), right.state_count());
    let letters = k.letter_count();
    let mut delta = vec![vec![Vec::new(); letters]; m * n];
    for p in 0..m {
        for q in 0..n {
            for (a, succ) in delta[p * n + q].iter_mut().enumerate() {
                let left_move = (k.step_index(p, a) * n + q) as u32;
                let right_move = (p * n + right.step_index(q, a)) as u32;
                succ.push(left_move.min(right_move));
                if left_move != right_move {
                    succ.push(left_move.max(right_move));
                }
            }
        }
    }
    let finals = (0..m * n)
        .map(|i| k.is_final_index(i / n) && right.is_final_index(i % n))
        .collect();
    let initial = k.initial_index() * n + right.initial_index();
    let nfa = Nfa::from_parts(k.alphabet().to_vec(), delta, initial, finals);
    Ok(ShuffleNfa {
        left: k.clone(),
        right,
        nfa,
    })
}

fn aligned_right(k: &Dfa, l: &Dfa) -> Result<Dfa> {
    if k.alphabet() == l.alphabet() {
        return Ok(l.clone());
    }
    l.reorder_alphabet(k.alphabet())
        .map_err(|_| Error::AlphabetMismatch {
            left: k.alphabet().to_vec(),
            right: l.alphabet().to_vec(),
        })
}

impl ShuffleNfa {
    pub fn left(&self) -> &Dfa {
        &self.left
    }

    pub fn right(&self) -> &Dfa {
        &self.right
    }

    pub fn nfa(&self) -> &Nfa {
        &self.nfa
    }

    pub fn m(&self) -> usize {
        self.left.state_count()
    }

    pub fn n(&self) -> usize {
        self.right.state_count()
    }

    /// 0-based NFA index of the 1-based product state `(p, q)`.
    pub fn state_index(&self, p: usize, q: usize) -> usize {
        (p - 1) * self.n() + (q - 1)
    }

    /// 1-based product state of an NFA index.
    pub fn state_pair(&self, index: usize) -> (usize, usize) {
        (index / self.n() + 1, index % self.n() + 1)
    }

    /// 1-based successors of `(p, q)` on the letter with index `a`.
    pub fn successors(&self, p: usize, q: usize, a: usize) -> Vec<(usize, usize)> {
        self.nfa
            .successors_index(self.state_index(p, q), a)
            .iter()
            .map(|&i| self.state_pair(i as usize))
            .collect()
    }

    /// Converts an NFA state set into the fixed-width encoding.
    pub fn to_subset(&self, set: &StateSet) -> Result<ProductSubset> {
        let bits = set.iter().fold(0u64, |acc, i| acc | 1 << i);
        ProductSubset::from_bits(self.m(), self.n(), bits)
    }

    /// Accessible part of the subset automaton over 64-bit encodings.
    ///
    /// Requires `m·n ≤ 64`. State `i` of the DFA is `subsets[i]`; numbering is
    /// breadth-first with letters in alphabet order, as in
    /// [`Nfa::determinize`].
    pub fn subset_automaton(&self) -> Result<(Dfa, Vec<ProductSubset>)> {
        let (m, n) = (self.m(), self.n());
        if m * n > MAX_GRID_CELLS {
            return Err(Error::guard(
                "grid cells m*n",
                MAX_GRID_CELLS as u128,
                (m * n) as u128,
            ));
        }
        let letters = self.nfa.letter_count();
        let succ: Vec<Vec<u64>> = (0..letters)
            .map(|a| {
                (0..m * n)
                    .map(|i| {
                        self.nfa
                            .successors_index(i, a)
                            .iter()
                            .fold(0u64, |acc, &j| acc | 1 << j)
                    })
                    .collect()
            })
            .collect();
        let start = 1u64 << self.nfa.initial_index();
        let mut ids: HashMap<u64, u32> = HashMap::from([(start, 0)]);
        let mut order = vec![start];
        let mut table: Vec<Vec<u32>> = vec![Vec::new(); letters];
        let mut head = 0;
        while head < order.len() {
            let s = order[head];
            head += 1;
            for (a, col) in table.iter_mut().enumerate() {
                let t = iter_bits(s).fold(0u64, |acc, i| acc | succ[a][i]);
                let next = order.len() as u32;
                let id = *ids.entry(t).or_insert_with(|| {
                    order.push(t);
                    next
                });
                col.push(id);
            }
        }
        let finals_mask = self
            .nfa
            .final_indices()
            .into_iter()
            .fold(0u64, |acc, i| acc | 1 << i);
        let finals = order.iter().map(|&s| s & finals_mask != 0).collect();
        let delta = table
            .into_iter()
            .map(Transformation::from_indices)
            .collect();
        let dfa = Dfa::from_parts(self.nfa.alphabet().to_vec(), delta, 0, finals);
        let subsets = order
            .into_iter()
            .map(|b| ProductSubset::raw(m, n, b))
            .collect();
        Ok((dfa, subsets))
    }
}

/// `κ(L(K) ⧢ L(L))`: states of the minimal DFA of the shuffle.
///
/// Uses the 64-bit subset construction when the product grid fits, and the
/// general subset construction otherwise.
pub fn shuffle_state_complexity(k: &Dfa, l: &Dfa) -> Result<usize> {
    let nfa = build_shuffle_nfa(k, l)?;
    if nfa.m() * nfa.n() <= MAX_GRID_CELLS {
        let (dfa, _) = nfa.subset_automaton()?;
        Ok(state_complexity(&dfa))
    } else {
        Ok(state_complexity(&nfa.nfa().determinize().dfa))
    }
}

/// Reference route through the generic NFA machinery, used to cross-check
/// the fast path.
pub fn shuffle_state_complexity_generic(k: &Dfa, l: &Dfa) -> Result<usize> {
    let nfa = build_shuffle_nfa(k, l)?;
    Ok(state_complexity(&nfa.nfa().determinize().dfa))
}
