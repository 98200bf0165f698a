//! The enumeration engine: letter multisets in nondecreasing code order,
//! sharded by the first letter, each evaluated by a subset BFS on the
//! product grid and partition refinement per final-set choice.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::reach::step_bits;
use crate::search::pair::{letter_images, relabelings, PairForm, Relabeling};
use crate::search::{SearchMode, SearchSpace};

/// Options of one run of the engine.
#[derive(Clone, Copy, Debug)]
pub(crate) struct EngineOptions {
    pub mode: SearchMode,
    /// Stop every shard once any witness meeting the bound is found.
    pub stop_at_bound: bool,
    /// Skip multisets whose reachable-subset count is below the shard's
    /// current best (they cannot reach it).
    pub prune_below_best: bool,
}

#[derive(Debug, Default)]
pub(crate) struct EngineOutcome {
    pub best: usize,
    pub multisets: u64,
    pub evaluated: u64,
    /// Canonical forms attaining `best`, sorted.
    pub witnesses: Vec<PairForm>,
}

struct Tables {
    m: usize,
    n: usize,
    cells: usize,
    pool: usize,
    rows: Vec<Vec<u32>>,
    cols: Vec<Vec<u32>>,
    /// Class `s(1)·n + t(1)` of every letter; class 0 sends `(1,1)` to itself.
    class: Vec<usize>,
    chunks: usize,
    step: Vec<u64>,
    group: Vec<Relabeling>,
    /// Nonempty proper final masks.
    left_masks: Vec<u32>,
    right_masks: Vec<u32>,
    bound: usize,
}

impl Tables {
    fn new(space: &SearchSpace) -> Self {
        let (m, n) = (space.m, space.n);
        let cells = m * n;
        let pool = space.letter_pool;
        let (rows, cols): (Vec<_>, Vec<_>) =
            (0..pool as u32).map(|c| letter_images(m, n, c)).unzip();
        let class = (0..pool)
            .map(|c| rows[c][0] as usize * n + cols[c][0] as usize)
            .collect();
        let chunks = cells.div_ceil(8);
        let mut step = vec![0u64; pool * chunks * 256];
        for c in 0..pool {
            for chunk in 0..chunks {
                for byte in 0..256u64 {
                    let bits = (byte << (8 * chunk)) & crate::shuffle::grid_mask(m, n);
                    step[(c * chunks + chunk) * 256 + byte as usize] =
                        step_bits(bits, m, n, &rows[c], &cols[c]);
                }
            }
        }
        Tables {
            m,
            n,
            cells,
            pool,
            rows,
            cols,
            class,
            chunks,
            step,
            group: relabelings(m, n, Some(pool)),
            left_masks: (1..(1u32 << m) - 1).collect(),
            right_masks: (1..(1u32 << n) - 1).collect(),
            bound: space.bound as usize,
        }
    }

    #[inline]
    fn apply(&self, code: usize, bits: u64) -> u64 {
        let base = code * self.chunks;
        let mut out = 0;
        for chunk in 0..self.chunks {
            let byte = (bits >> (8 * chunk)) & 0xff;
            if byte != 0 {
                out |= self.step[(base + chunk) * 256 + byte as usize];
            }
        }
        out
    }
}

/// Per-thread scratch: a stamped index over all subsets of the grid.
struct Scratch {
    stamp: Vec<u32>,
    index: Vec<u32>,
    generation: u32,
    reached: Vec<u64>,
    trans: Vec<u32>,
}

impl Scratch {
    fn new(cells: usize) -> Self {
        Scratch {
            stamp: vec![0; 1 << cells],
            index: vec![0; 1 << cells],
            generation: 0,
            reached: Vec::new(),
            trans: Vec::new(),
        }
    }
}

/// Subset BFS from `{(1,1)}`; fills `reached` and the transition table.
fn explore(t: &Tables, letters: &[usize], sc: &mut Scratch) {
    sc.generation = sc.generation.wrapping_add(1);
    if sc.generation == 0 {
        sc.stamp.fill(0);
        sc.generation = 1;
    }
    let g = sc.generation;
    sc.reached.clear();
    sc.trans.clear();
    sc.reached.push(1);
    sc.stamp[1] = g;
    sc.index[1] = 0;
    let mut head = 0;
    while head < sc.reached.len() {
        let s = sc.reached[head];
        head += 1;
        for &c in letters {
            let x = t.apply(c, s) as usize;
            if sc.stamp[x] != g {
                sc.stamp[x] = g;
                sc.index[x] = sc.reached.len() as u32;
                sc.reached.push(x as u64);
            }
            sc.trans.push(sc.index[x]);
        }
    }
}

/// Number of classes of the coarsest partition of `0..states` that
/// separates `finals` and is stable under `trans` (row-major,
/// `letters` entries per state).
pub(crate) fn refine(states: usize, letters: usize, trans: &[u32], finals: &[bool]) -> usize {
    let mut class: Vec<u32> = finals.iter().map(|&f| f as u32).collect();
    let mut count = if finals.iter().all(|&f| f) || finals.iter().all(|&f| !f) {
        1
    } else {
        2
    };
    if count == 1 {
        class.fill(0);
    }
    let width = letters + 1;
    let mut sig = vec![0u32; states * width];
    let mut order: Vec<usize> = (0..states).collect();
    loop {
        for q in 0..states {
            sig[q * width] = class[q];
            for x in 0..letters {
                sig[q * width + 1 + x] = class[trans[q * letters + x] as usize];
            }
        }
        let key = |q: usize| &sig[q * width..(q + 1) * width];
        order.sort_unstable_by(|&a, &b| key(a).cmp(key(b)));
        let mut next = 0u32;
        for i in 0..states {
            if i > 0 && key(order[i]) != key(order[i - 1]) {
                next += 1;
            }
            class[order[i]] = next;
        }
        let new_count = next as usize + 1;
        if new_count == count {
            return count;
        }
        count = new_count;
    }
}

/// True when the DFA with the given transformations (0-based images, state
/// 0 initial) and final mask is minimal with `states` states.
fn is_minimal(states: usize, maps: &[&[u32]], finals: u32) -> bool {
    let mut seen = 1u32;
    let mut stack = vec![0usize];
    while let Some(q) = stack.pop() {
        for map in maps {
            let r = map[q] as usize;
            if seen >> r & 1 == 0 {
                seen |= 1 << r;
                stack.push(r);
            }
        }
    }
    if seen.count_ones() as usize != states {
        return false;
    }
    let trans: Vec<u32> = (0..states)
        .flat_map(|q| maps.iter().map(move |map| map[q]))
        .collect();
    let flags: Vec<bool> = (0..states).map(|q| finals >> q & 1 == 1).collect();
    refine(states, maps.len(), &trans, &flags) == states
}

struct Shard<'a> {
    t: &'a Tables,
    k: usize,
    opts: EngineOptions,
    stop: &'a AtomicBool,
    codes: Vec<usize>,
    class_count: Vec<u8>,
    missing: usize,
    out: EngineOutcome,
}

impl Shard<'_> {
    fn push(&mut self, c: usize) {
        let class = self.t.class[c];
        if class != 0 && self.class_count[class] == 0 {
            self.missing -= 1;
        }
        self.class_count[class] += 1;
        self.codes.push(c);
    }

    fn pop(&mut self) {
        let c = self.codes.pop().expect("nonempty prefix");
        let class = self.t.class[c];
        self.class_count[class] -= 1;
        if class != 0 && self.class_count[class] == 0 {
            self.missing += 1;
        }
    }

    fn descend(&mut self, sc: &mut Scratch) {
        if self.opts.stop_at_bound && self.stop.load(Ordering::Relaxed) {
            return;
        }
        let left = self.k - self.codes.len();
        if self.opts.mode == SearchMode::BoundTargeted && self.missing > left {
            return;
        }
        if left == 0 {
            self.evaluate(sc);
            return;
        }
        let from = *self.codes.last().expect("shards fix the first letter");
        for c in from..self.t.pool {
            self.push(c);
            self.descend(sc);
            self.pop();
        }
    }

    fn evaluate(&mut self, sc: &mut Scratch) {
        let t = self.t;
        self.out.multisets += 1;
        // orbit test on the letters; relabelings fixing them are kept for the finals
        let mut stabilizers: Vec<&Relabeling> = Vec::new();
        let mut image = vec![0u32; self.k];
        for g in &t.group {
            for (slot, &c) in image.iter_mut().zip(&self.codes) {
                *slot = g.code[c];
            }
            image.sort_unstable();
            match image
                .iter()
                .map(|&c| c as usize)
                .cmp(self.codes.iter().copied())
            {
                std::cmp::Ordering::Less => return,
                std::cmp::Ordering::Equal => stabilizers.push(g),
                std::cmp::Ordering::Greater => {}
            }
        }
        let mut letters = self.codes.clone();
        letters.dedup();
        explore(t, &letters, sc);
        let states = sc.reached.len();
        match self.opts.mode {
            SearchMode::BoundTargeted if states < t.bound => return,
            _ if self.opts.prune_below_best && states < self.out.best => return,
            _ => {}
        }
        let row_maps: Vec<&[u32]> = letters.iter().map(|&c| t.rows[c].as_slice()).collect();
        let col_maps: Vec<&[u32]> = letters.iter().map(|&c| t.cols[c].as_slice()).collect();
        let left_ok: Vec<u32> = t
            .left_masks
            .iter()
            .copied()
            .filter(|&f| is_minimal(t.m, &row_maps, f))
            .collect();
        let right_ok: Vec<u32> = t
            .right_masks
            .iter()
            .copied()
            .filter(|&f| is_minimal(t.n, &col_maps, f))
            .collect();
        let mut finals = vec![false; states];
        for &fk in &left_ok {
            for &fl in &right_ok {
                if stabilizers.iter().any(|g| g.finals(fk, fl) < (fk, fl)) {
                    continue;
                }
                let cells = final_cells(t, fk, fl);
                for (flag, &s) in finals.iter_mut().zip(&sc.reached) {
                    *flag = s & cells != 0;
                }
                let kappa = refine(states, letters.len(), &sc.trans, &finals);
                self.out.evaluated += 1;
                if kappa > self.out.best {
                    self.out.best = kappa;
                    self.out.witnesses.clear();
                }
                if kappa == self.out.best {
                    self.out.witnesses.push(PairForm {
                        m: t.m,
                        n: t.n,
                        codes: self.codes.iter().map(|&c| c as u32).collect(),
                        left_finals: fk,
                        right_finals: fl,
                    });
                    if kappa == t.bound && self.opts.stop_at_bound {
                        self.stop.store(true, Ordering::Relaxed);
                    }
                }
            }
        }
    }
}

/// Grid cells `(p, q)` with `p` final on the left and `q` on the right.
fn final_cells(t: &Tables, fk: u32, fl: u32) -> u64 {
    let mut cells = 0u64;
    for p in 0..t.m {
        for q in 0..t.n {
            if fk >> p & 1 == 1 && fl >> q & 1 == 1 {
                cells |= 1 << (p * t.n + q);
            }
        }
    }
    cells
}

pub(crate) fn run(space: &SearchSpace, opts: EngineOptions) -> EngineOutcome {
    let t = Tables::new(space);
    let stop = AtomicBool::new(false);
    let classes = t.m * t.n;
    let shards: Vec<EngineOutcome> = (0..t.pool)
        .into_par_iter()
        .map_init(
            || Scratch::new(t.cells),
            |sc, first| {
                let mut shard = Shard {
                    t: &t,
                    k: space.k,
                    opts,
                    stop: &stop,
                    codes: Vec::with_capacity(space.k),
                    class_count: vec![0; classes],
                    missing: classes - 1,
                    out: EngineOutcome::default(),
                };
                shard.push(first);
                shard.descend(sc);
                shard.out
            },
        )
        .collect();
    let best = shards.iter().map(|s| s.best).max().unwrap_or(0);
    let mut merged = EngineOutcome {
        best,
        ..EngineOutcome::default()
    };
    for s in shards {
        merged.multisets += s.multisets;
        merged.evaluated += s.evaluated;
        if s.best == best {
            merged.witnesses.extend(s.witnesses);
        }
    }
    merged.witnesses.sort();
    merged.witnesses.dedup();
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refine_counts_classes() {
        // a 3-cycle with one final state is minimal
        let trans = [1, 2, 0];
        assert_eq!(refine(3, 1, &trans, &[false, false, true]), 3);
        // a 4-cycle with alternating finals collapses to 2
        let trans = [1, 2, 3, 0];
        assert_eq!(refine(4, 1, &trans, &[true, false, true, false]), 2);
        assert_eq!(refine(2, 1, &[1, 0], &[false, false]), 1);
    }

    #[test]
    fn minimality_needs_reachability_and_separation() {
        let swap: &[u32] = &[1, 0];
        let id: &[u32] = &[0, 1];
        assert!(is_minimal(2, &[swap], 0b10));
        assert!(!is_minimal(2, &[id], 0b10));
        assert!(!is_minimal(2, &[swap], 0b11));
    }
}
