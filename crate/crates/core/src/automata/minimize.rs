//! Hopcroft's partition refinement.

use crate::automata::{Dfa, Transformation};

/// Refinable partition of `0..n`; each block is a contiguous slice of `elems`.
struct Partition {
    elems: Vec<usize>,
    loc: Vec<usize>,
    block_of: Vec<usize>,
    start: Vec<usize>,
    end: Vec<usize>,
    marked: Vec<usize>,
}

impl Partition {
    fn new(classes: &[Vec<usize>], n: usize) -> Self {
        let mut p = Partition {
            elems: Vec::with_capacity(n),
            loc: vec![0; n],
            block_of: vec![0; n],
            start: Vec::new(),
            end: Vec::new(),
            marked: Vec::new(),
        };
        for class in classes.iter().filter(|c| !c.is_empty()) {
            let b = p.start.len();
            p.start.push(p.elems.len());
            for &q in class {
                p.loc[q] = p.elems.len();
                p.block_of[q] = b;
                p.elems.push(q);
            }
            p.end.push(p.elems.len());
            p.marked.push(0);
        }
        p
    }

    fn block_count(&self) -> usize {
        self.start.len()
    }

    fn size(&self, b: usize) -> usize {
        self.end[b] - self.start[b]
    }

    fn members(&self, b: usize) -> &[usize] {
        &self.elems[self.start[b]..self.end[b]]
    }

    /// Moves `q` into the marked prefix of its block; returns true if this
    /// is the first mark in the block.
    fn mark(&mut self, q: usize) -> bool {
        let b = self.block_of[q];
        let pos = self.loc[q];
        let front = self.start[b] + self.marked[b];
        if pos < front {
            return false;
        }
        let other = self.elems[front];
        self.elems.swap(pos, front);
        self.loc[other] = pos;
        self.loc[q] = front;
        self.marked[b] += 1;
        self.marked[b] == 1
    }

    /// Splits the marked prefix off `b`. Returns the new block id, if any.
    fn split(&mut self, b: usize) -> Option<usize> {
        let m = std::mem::take(&mut self.marked[b]);
        if m == 0 || m == self.size(b) {
            return None;
        }
        let nb = self.start.len();
        let s = self.start[b];
        self.start.push(s);
        self.end.push(s + m);
        self.marked.push(0);
        self.start[b] = s + m;
        for i in s..s + m {
            self.block_of[self.elems[i]] = nb;
        }
        Some(nb)
    }
}

/// Blocks of the Myhill-Nerode equivalence on the reachable part of `d`,
/// returned as a block id for every state of the trimmed automaton.
fn equivalence_classes(d: &Dfa) -> (Vec<usize>, usize) {
    let n = d.state_count();
    let k = d.letter_count();

    // inverse transitions in CSR form per letter
    let mut inv_start = vec![vec![0usize; n + 1]; k];
    let mut inv = vec![vec![0usize; n]; k];
    for a in 0..k {
        let t = d.delta(a);
        for q in 0..n {
            inv_start[a][t.apply_index(q) + 1] += 1;
        }
        for q in 0..n {
            inv_start[a][q + 1] += inv_start[a][q];
        }
        let mut fill = inv_start[a].clone();
        for q in 0..n {
            let r = t.apply_index(q);
            inv[a][fill[r]] = q;
            fill[r] += 1;
        }
    }

    let (fin, non): (Vec<usize>, Vec<usize>) = (0..n).partition(|&q| d.is_final_index(q));
    let mut part = Partition::new(&[fin, non], n);
    let mut pending: Vec<Vec<bool>> = vec![vec![false; k]; part.block_count()];
    let mut work: Vec<(usize, usize)> = Vec::new();
    if part.block_count() == 2 {
        let smaller = if part.size(0) <= part.size(1) { 0 } else { 1 };
        for a in 0..k {
            work.push((smaller, a));
            pending[smaller][a] = true;
        }
    }

    let mut touched = Vec::new();
    while let Some((b, a)) = work.pop() {
        pending[b][a] = false;
        let splitter: Vec<usize> = part.members(b).to_vec();
        for &q in &splitter {
            for &p in &inv[a][inv_start[a][q]..inv_start[a][q + 1]] {
                if part.mark(p) {
                    touched.push(part.block_of[p]);
                }
            }
        }
        for x in touched.drain(..) {
            if let Some(y) = part.split(x) {
                pending.push(vec![false; k]);
                for c in 0..k {
                    if pending[x][c] {
                        work.push((y, c));
                        pending[y][c] = true;
                    } else {
                        let s = if part.size(x) <= part.size(y) { x } else { y };
                        work.push((s, c));
                        pending[s][c] = true;
                    }
                }
            }
        }
    }
    let count = part.block_count();
    (part.block_of, count)
}

/// Minimal complete DFA for the language of `d`.
///
/// States of the result are numbered in BFS order from the initial state
/// with letters taken in alphabet order.
pub fn minimize(d: &Dfa) -> Dfa {
    let trimmed = d.trim();
    let (block_of, count) = equivalence_classes(&trimmed);
    let n = trimmed.state_count();
    let mut rep = vec![usize::MAX; count];
    for q in 0..n {
        if rep[block_of[q]] == usize::MAX {
            rep[block_of[q]] = q;
        }
    }
    let quotient_delta = (0..trimmed.letter_count())
        .map(|a| {
            Transformation::from_indices(
                (0..count)
                    .map(|b| block_of[trimmed.step_index(rep[b], a)] as u32)
                    .collect(),
            )
        })
        .collect();
    let finals = (0..count).map(|b| trimmed.is_final_index(rep[b])).collect();
    let quotient = Dfa::from_parts(
        trimmed.alphabet().to_vec(),
        quotient_delta,
        block_of[trimmed.initial_index()],
        finals,
    );
    quotient.trim()
}

/// Number of states of the minimal complete DFA of `L(d)`.
pub fn state_complexity(d: &Dfa) -> usize {
    let trimmed = d.trim();
    equivalence_classes(&trimmed).1
}
