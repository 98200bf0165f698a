use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::reach::checkpoint::Checkpoint;
use crate::reach::letter::{alphabet_id, step_bits, ExtremalLetter};
use crate::shuffle::{bound_f_u64, is_valid_bits, row_of};

/// Largest `m·n` explored with the full alphabet.
pub const FULL_ALPHABET_GRID_GUARD: usize = 24;
/// Largest `m·n` explored with an explicit letter list.
pub const LETTER_LIST_GRID_GUARD: usize = 30;
/// Largest `m^m · n^n` accepted for full-alphabet exploration.
pub const FULL_ALPHABET_LETTER_GUARD: u128 = 1 << 20;
/// Number of unreached valid subsets listed in a report.
pub const UNREACHED_SAMPLE: usize = 32;

/// Which letters of `D_{m,n}` a search may use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphabetSpec {
    Full,
    Letters(Vec<ExtremalLetter>),
}

impl AlphabetSpec {
    pub fn id(&self) -> String {
        match self {
            AlphabetSpec::Full => "full".to_string(),
            AlphabetSpec::Letters(letters) => alphabet_id(letters),
        }
    }

    fn descriptor(&self) -> AlphabetDescriptor {
        match self {
            AlphabetSpec::Full => AlphabetDescriptor::Full,
            AlphabetSpec::Letters(l) => AlphabetDescriptor::Letters {
                count: l.len(),
                id: alphabet_id(l),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphabetDescriptor {
    Full,
    Letters { count: usize, id: String },
}

#[derive(Clone, Debug, Default)]
pub struct CheckpointOptions {
    pub dir: PathBuf,
    /// Continue from the checkpoint named by `LATEST` in `dir`.
    pub resume: bool,
    /// Stop once this many generations are complete (simulated interruption).
    pub stop_after: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct ReachOptions {
    pub workers: usize,
    pub checkpoint: Option<CheckpointOptions>,
}

impl Default for ReachOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            checkpoint: None,
        }
    }
}

/// Outcome of a reachability search. Equality ignores the elapsed time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReachReport {
    pub m: usize,
    pub n: usize,
    pub alphabet: AlphabetDescriptor,
    pub bound: u64,
    pub reached: u64,
    pub complete: bool,
    /// False when the search stopped before its fixpoint.
    pub fixpoint: bool,
    pub generations: u64,
    pub unreached_sample: Vec<u64>,
    pub elapsed_seconds: f64,
    pub checkpoint_lineage: Option<String>,
}

impl PartialEq for ReachReport {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self, other);
        a.m == b.m
            && a.n == b.n
            && a.alphabet == b.alphabet
            && a.bound == b.bound
            && a.reached == b.reached
            && a.complete == b.complete
            && a.fixpoint == b.fixpoint
            && a.generations == b.generations
            && a.unreached_sample == b.unreached_sample
            && a.checkpoint_lineage == b.checkpoint_lineage
    }
}

/// Successor generator for one subset.
trait Expander: Sync {
    fn expand(&self, bits: u64, emit: &mut dyn FnMut(u64));
}

struct LetterExpander {
    m: usize,
    n: usize,
    letters: Vec<(Vec<u32>, Vec<u32>)>,
}

impl Expander for LetterExpander {
    fn expand(&self, bits: u64, emit: &mut dyn FnMut(u64)) {
        for (s, t) in &self.letters {
            emit(step_bits(bits, self.m, self.n, s, t));
        }
    }
}

/// Expands over all of `T_m × T_n` without listing letters: the successor
/// under `a_{s,t}` is `K_s(S) ∪ L_t(S)`, where `K_s` moves rows and `L_t`
/// moves columns, so it suffices to combine every distinct row image with
/// every distinct column image.
pub(crate) struct FullExpander {
    m: usize,
    n: usize,
}

impl FullExpander {
    pub(crate) fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    /// Distinct images `K_s(S)` with the smallest code of an `s` producing
    /// each one (rows not occupied in `S` are fixed by that `s`).
    pub(crate) fn row_images(&self, bits: u64) -> Vec<(u64, u32)> {
        let (m, n) = (self.m, self.n);
        let rows: Vec<(usize, u64)> = (0..m)
            .map(|p| (p, row_of(bits, n, p)))
            .filter(|&(_, r)| r != 0)
            .collect();
        let mut target = vec![0usize; rows.len()];
        let mut out = Vec::new();
        loop {
            let mut image = 0u64;
            let mut s: Vec<u32> = (0..m as u32).collect();
            for (k, &(p, r)) in rows.iter().enumerate() {
                image |= r << (target[k] * n);
                s[p] = target[k] as u32;
            }
            out.push((image, super::letter::encode(&s)));
            if !advance(&mut target, m) {
                break;
            }
        }
        out.sort_unstable();
        out.dedup_by_key(|e| e.0);
        out
    }

    /// Distinct images `L_t(S)` with the smallest code of a `t` producing each.
    pub(crate) fn column_images(&self, bits: u64) -> Vec<(u64, u32)> {
        let (m, n) = (self.m, self.n);
        let row_masks: Vec<u64> = (0..m).map(|p| row_of(bits, n, p)).collect();
        let occupied = row_masks.iter().fold(0u64, |a, &r| a | r);
        let cols: Vec<usize> = (0..n).filter(|&q| occupied >> q & 1 == 1).collect();
        let mut target = vec![0usize; cols.len()];
        let mut out = Vec::new();
        let mut t: Vec<u32> = (0..n as u32).collect();
        loop {
            for (k, &q) in cols.iter().enumerate() {
                t[q] = target[k] as u32;
            }
            let mut image = 0u64;
            for (p, &r) in row_masks.iter().enumerate() {
                let mut rest = r;
                let mut img = 0u64;
                while rest != 0 {
                    let q = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    img |= 1 << t[q];
                }
                image |= img << (p * n);
            }
            out.push((image, super::letter::encode(&t)));
            if !advance(&mut target, n) {
                break;
            }
        }
        out.sort_unstable();
        out.dedup_by_key(|e| e.0);
        out
    }
}

/// Odometer increment over digits in `0..base`; false after the last value.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

impl Expander for FullExpander {
    fn expand(&self, bits: u64, emit: &mut dyn FnMut(u64)) {
        let rows = self.row_images(bits);
        let cols = self.column_images(bits);
        for &(k, _) in &rows {
            for &(l, _) in &cols {
                emit(k | l);
            }
        }
    }
}

pub(crate) fn full_alphabet_size(m: usize, n: usize) -> u128 {
    (m as u128).pow(m as u32) * (n as u128).pow(n as u32)
}

fn check_guards(m: usize, n: usize, alphabet: &AlphabetSpec) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("grid dimensions must be positive"));
    }
    match alphabet {
        AlphabetSpec::Full => {
            if m * n > FULL_ALPHABET_GRID_GUARD {
                return Err(Error::guard(
                    "grid cells m*n (full alphabet)",
                    FULL_ALPHABET_GRID_GUARD as u128,
                    (m * n) as u128,
                ));
            }
            let letters = full_alphabet_size(m, n);
            if letters > FULL_ALPHABET_LETTER_GUARD {
                return Err(Error::guard(
                    "full alphabet size m^m*n^n",
                    FULL_ALPHABET_LETTER_GUARD,
                    letters,
                ));
            }
        }
        AlphabetSpec::Letters(letters) => {
            if m * n > LETTER_LIST_GRID_GUARD {
                return Err(Error::guard(
                    "grid cells m*n (letter list)",
                    LETTER_LIST_GRID_GUARD as u128,
                    (m * n) as u128,
                ));
            }
            if let Some(a) = letters.iter().find(|a| a.m() != m || a.n() != n) {
                return Err(Error::invalid(format!(
                    "letter acts on {}x{}, expected {m}x{n}",
                    a.m(),
                    a.n()
                )));
            }
        }
    }
    Ok(())
}

fn lineage(m: usize, n: usize, alphabet_id: &str) -> String {
    let digest = Sha256::digest(format!("{m}x{n}:{alphabet_id}").as_bytes());
    hex::encode(&digest[..8])
}

/// Breadth-first exploration of `D_{m,n}` from `{(1,1)}`.
///
/// Generations are barriers; inside a generation the frontier is split among
/// `workers` threads which claim newly seen subsets with an atomic or on the
/// shared bitmap. The next frontier is sorted, so reports do not depend on
/// the worker count.
pub fn bfs_reach(
    m: usize,
    n: usize,
    alphabet: &AlphabetSpec,
    opts: &ReachOptions,
) -> Result<ReachReport> {
    check_guards(m, n, alphabet)?;
    let start = Instant::now();
    let expander: Box<dyn Expander> = match alphabet {
        AlphabetSpec::Full => Box::new(FullExpander::new(m, n)),
        AlphabetSpec::Letters(letters) => Box::new(LetterExpander {
            m,
            n,
            letters: letters
                .iter()
                .map(|a| (a.s.indices().to_vec(), a.t.indices().to_vec()))
                .collect(),
        }),
    };
    let nbits = 1u64 << (m * n);
    let nwords = nbits.div_ceil(64) as usize;
    let id = alphabet.id();

    let (visited, mut frontier, mut generation) = match &opts.checkpoint {
        Some(c) if c.resume => {
            let ck = Checkpoint::load_latest(&c.dir)?;
            let h = &ck.header;
            if h.m != m || h.n != n || h.alphabet_id != id {
                return Err(Error::Checkpoint(format!(
                    "checkpoint is for {}x{} alphabet {}, requested {m}x{n} alphabet {id}",
                    h.m, h.n, h.alphabet_id
                )));
            }
            let words: Vec<AtomicU64> = ck.visited.into_iter().map(AtomicU64::new).collect();
            (words, ck.frontier, ck.header.generation)
        }
        _ => {
            let words: Vec<AtomicU64> = (0..nwords).map(|_| AtomicU64::new(0)).collect();
            words[0].fetch_or(1 << 1, Ordering::Relaxed);
            (words, vec![1u64], 0)
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let stop_after = opts.checkpoint.as_ref().and_then(|c| c.stop_after);

    while !frontier.is_empty() {
        if stop_after.is_some_and(|g| generation >= g) {
            break;
        }
        let chunk = frontier.len().div_ceil(opts.workers.max(1) * 8).max(1);
        let parts: Vec<Vec<u64>> = pool.install(|| {
            frontier
                .par_chunks(chunk)
                .map(|part| {
                    let mut found = Vec::new();
                    for &s in part {
                        expander.expand(s, &mut |x| {
                            let (w, b) = ((x / 64) as usize, 1u64 << (x % 64));
                            if visited[w].load(Ordering::Relaxed) & b == 0
                                && visited[w].fetch_or(b, Ordering::Relaxed) & b == 0
                            {
                                found.push(x);
                            }
                        });
                    }
                    found
                })
                .collect()
        });
        frontier = parts.concat();
        frontier.sort_unstable();
        generation += 1;
        if let Some(c) = &opts.checkpoint {
            let words = visited.iter().map(|w| w.load(Ordering::Relaxed)).collect();
            Checkpoint::new(m, n, &id, generation, words, frontier.clone()).write(&c.dir)?;
        }
    }

    let words: Vec<u64> = visited.iter().map(|w| w.load(Ordering::Relaxed)).collect();
    let bound = bound_f_u64(m, n)?;
    let mut reached = 0u64;
    let mut unreached = Vec::new();
    for s in 0..nbits {
        let seen = words[(s / 64) as usize] >> (s % 64) & 1 == 1;
        let valid = is_valid_bits(s, m, n);
        if seen && !valid {
            return Err(Error::Invariant(format!(
                "reached subset {s} violates Condition (C)"
            )));
        }
        if seen {
            reached += 1;
        } else if valid && unreached.len() < UNREACHED_SAMPLE {
            unreached.push(s);
        }
    }
    if reached > bound {
        return Err(Error::Invariant(format!(
            "reached {reached} exceeds bound {bound}"
        )));
    }
    Ok(ReachReport {
        m,
        n,
        alphabet: alphabet.descriptor(),
        bound,
        reached,
        complete: reached == bound,
        fixpoint: frontier.is_empty(),
        generations: generation,
        unreached_sample: unreached,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        checkpoint_lineage: opts.checkpoint.as_ref().map(|_| lineage(m, n, &id)),
    })
}

/// Sequential reach count over an explicit letter list, for small grids.
#[cfg(test)]
fn reach_count(m: usize, n: usize, letters: &[&ExtremalLetter]) -> u64 {
    reached_set(m, n, letters)
        .iter()
        .map(|w| w.count_ones() as u64)
        .sum()
}

/// Sequential visited bitmap over an explicit letter list.
pub(crate) fn reached_set(m: usize, n: usize, letters: &[&ExtremalLetter]) -> Vec<u64> {
    let nbits = 1u64 << (m * n);
    let mut seen = vec![0u64; nbits.div_ceil(64) as usize];
    seen[0] = 1 << 1;
    let mut stack = vec![1u64];
    while let Some(s) = stack.pop() {
        for a in letters {
            let x = step_bits(s, m, n, a.s.indices(), a.t.indices());
            let (w, b) = ((x / 64) as usize, 1u64 << (x % 64));
            if seen[w] & b == 0 {
                seen[w] |= b;
                stack.push(x);
            }
        }
    }
    seen
}

/// Largest `m·n` for which a breadth-first tree is stored densely.
pub const TREE_GRID_GUARD: usize = 20;

/// Breadth-first spanning tree of the reachable part of `D_{m,n}` over the
/// full alphabet. Built sequentially so parents are reproducible: each new
/// subset records the first (frontier order, letter order) edge reaching it.
#[derive(Clone, Debug)]
pub struct ReachTree {
    pub m: usize,
    pub n: usize,
    parent: Vec<u64>,
    letter: Vec<(u32, u32)>,
    depth: Vec<u16>,
}

const NO_PARENT: u64 = u64::MAX;

impl ReachTree {
    pub fn build(m: usize, n: usize) -> Result<Self> {
        check_guards(m, n, &AlphabetSpec::Full)?;
        if m * n > TREE_GRID_GUARD {
            return Err(Error::guard(
                "grid cells m*n (tree)",
                TREE_GRID_GUARD as u128,
                (m * n) as u128,
            ));
        }
        let size = 1usize << (m * n);
        let mut parent = vec![NO_PARENT; size];
        let mut letter = vec![(0u32, 0u32); size];
        let mut depth = vec![u16::MAX; size];
        depth[1] = 0;
        let expander = FullExpander::new(m, n);
        let mut frontier = vec![1u64];
        let mut d = 0u16;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for &s in &frontier {
                let rows = expander.row_images(s);
                let cols = expander.column_images(s);
                for &(k, sc) in &rows {
                    for &(l, tc) in &cols {
                        let x = (k | l) as usize;
                        if depth[x] == u16::MAX {
                            depth[x] = d;
                            parent[x] = s;
                            letter[x] = (sc, tc);
                            next.push(x as u64);
                        }
                    }
                }
            }
            next.sort_unstable();
            frontier = next;
        }
        Ok(Self {
            m,
            n,
            parent,
            letter,
            depth,
        })
    }

    pub fn is_reached(&self, s: u64) -> bool {
        self.depth.get(s as usize).is_some_and(|&d| d != u16::MAX)
    }

    /// Breadth-first depth of a reached subset.
    pub fn depth(&self, s: u64) -> Option<u16> {
        self.depth
            .get(s as usize)
            .copied()
            .filter(|&d| d != u16::MAX)
    }

    /// Parent subset and letter codes `(s, t)` of a reached non-initial subset.
    pub fn parent(&self, s: u64) -> Option<(u64, u32, u32)> {
        let p = *self.parent.get(s as usize)?;
        (p != NO_PARENT).then(|| {
            let (a, b) = self.letter[s as usize];
            (p, a, b)
        })
    }

    pub fn reached_count(&self) -> u64 {
        self.depth.iter().filter(|&&d| d != u16::MAX).count() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reach::letter::{full_alphabet, ExtremalLetter};

    #[test]
    fn full_alphabet_small_cases() {
        for (m, n, f) in [
            (1, 1, 1),
            (1, 3, 4),
            (2, 2, 10),
            (2, 3, 44),
            (3, 2, 44),
            (3, 3, 400),
        ] {
            let r = bfs_reach(m, n, &AlphabetSpec::Full, &ReachOptions::default()).unwrap();
            assert_eq!(r.reached, f, "({m},{n})");
            assert!(r.complete && r.fixpoint);
            assert!(r.unreached_sample.is_empty());
        }
    }

    #[test]
    fn fast_expander_matches_explicit_letters() {
        for (m, n) in [(2, 2), (2, 3), (3, 2)] {
            let letters: Vec<ExtremalLetter> = full_alphabet(m, n).collect();
            let full = FullExpander::new(m, n);
            for s in 0..1u64 << (m * n) {
                let mut a: Vec<u64> = Vec::new();
                full.expand(s, &mut |x| a.push(x));
                let mut b: Vec<u64> = letters
                    .iter()
                    .map(|l| step_bits(s, m, n, l.s.indices(), l.t.indices()))
                    .collect();
                a.sort_unstable();
                a.dedup();
                b.sort_unstable();
                b.dedup();
                assert_eq!(a, b, "subset {s} in {m}x{n}");
            }
        }
    }

    #[test]
    fn tree_edges_replay() {
        let tree = ReachTree::build(2, 3).unwrap();
        assert_eq!(tree.reached_count(), 44);
        for s in 0..64u64 {
            if let Some((p, a, b)) = tree.parent(s) {
                let l = ExtremalLetter::from_codes(2, 3, a, b);
                assert_eq!(step_bits(p, 2, 3, l.s.indices(), l.t.indices()), s);
                assert_eq!(tree.depth(p).unwrap() + 1, tree.depth(s).unwrap());
            }
        }
        assert!(tree.parent(1).is_none());
    }

    #[test]
    fn guards() {
        assert!(bfs_reach(5, 5, &AlphabetSpec::Full, &ReachOptions::default()).is_err());
        assert!(bfs_reach(4, 6, &AlphabetSpec::Full, &ReachOptions::default()).is_err());
    }

    #[test]
    fn three_letter_alphabets_for_two_by_two() {
        // Reachability alone needs only mn - 1 = 3 letters on the 2x2 grid;
        // the fourth letter of a witness pair is forced by minimality and
        // distinguishability, not by reachability.
        let letters: Vec<ExtremalLetter> = full_alphabet(2, 2).collect();
        let k = letters.len();
        let mut complete = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                for l in j + 1..k {
                    let chosen = [&letters[i], &letters[j], &letters[l]];
                    if reach_count(2, 2, &chosen) == 10 {
                        complete.push(chosen);
                    }
                }
            }
        }
        assert_eq!(complete.len(), 2);
        for chosen in complete {
            // each letter sends (1,1) to a different one of the three
            // non-initial cells, as the alphabet lower bound argument demands
            let mut firsts: Vec<_> = chosen
                .iter()
                .map(|a| (a.s.indices()[0], a.t.indices()[0]))
                .collect();
            firsts.sort();
            assert_eq!(firsts, vec![(0, 1), (1, 0), (1, 1)]);
        }
    }
}
