//! Exhaustive search over small DFA pairs for the largest state complexity
//! of their shuffle.
//!
//! A candidate is a pair of complete DFAs with `m` and `n` states, initial
//! state 1 on both sides, over `k` shared letters, each side minimal with
//! a nonempty proper final set. Each letter is a pair `(s, t)` of
//! transformations, so a candidate is a multiset of `k` letters plus two
//! final sets. Multisets are enumerated in nondecreasing code order, which
//! removes letter renamings, and a candidate is evaluated only if it is the
//! least member of its orbit under state relabeling (and operand exchange
//! when `m = n`), so no two evaluated candidates are isomorphic.
//!
//! The bound-targeted mode only visits multisets that contain, for every
//! `(s, t) ≠ (1, 1)`, a letter sending the initial state to `s` on the left
//! and to `t` on the right. The two-element subsets `{(1,1),(s,1)}`,
//! `{(1,1),(1,t)}` and `{(s,1),(1,t)}` can only be reached through such
//! letters, so every pair meeting the bound lies in this part of the space.

mod engine;
mod pair;

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::automata::{canonicalize, canonicalize_fixed_letters, CanonicalForm};
use crate::error::{Error, Result};
use crate::shuffle::{bound_f_u64, shuffle_state_complexity};
use engine::{run, EngineOptions};
pub use pair::{canonical_pair, PairForm, WitnessPair};

/// Refuse runs whose estimated number of evaluations exceeds this.
pub const SEARCH_VOLUME_GUARD: u128 = 1_000_000_000;
/// Largest shared alphabet searched.
pub const MAX_SEARCH_LETTERS: usize = 8;
/// Largest letter pool `m^m · n^n` searched.
pub const MAX_LETTER_POOL: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Every candidate; the maximum is exact.
    Exhaustive,
    /// Only letter multisets that can reach every valid subset; complete
    /// for pairs meeting the bound, silent about smaller values.
    BoundTargeted,
}

/// The candidate space for `m`- and `n`-state DFAs over `k` letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    /// `m^m · n^n` letters `(s, t)`.
    pub letter_pool: usize,
    /// Pairs of nonempty proper final sets.
    pub final_choices: usize,
    /// Number of state relabelings (with operand exchange when `m = n`).
    pub symmetry: usize,
    pub bound: u64,
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl SearchSpace {
    pub fn new(m: usize, n: usize, k: usize) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::invalid(format!(
                "search needs m, n >= 2 (got {m}, {n})"
            )));
        }
        if k == 0 || k > MAX_SEARCH_LETTERS {
            return Err(Error::invalid(format!(
                "letter count must be in 1..={MAX_SEARCH_LETTERS} (got {k})"
            )));
        }
        let pool = pair::pool_size(m, n).unwrap_or(u128::MAX);
        if pool > MAX_LETTER_POOL as u128 {
            return Err(Error::guard(
                "letter pool m^m * n^n",
                MAX_LETTER_POOL as u128,
                pool,
            ));
        }
        let symmetry = factorial(m - 1) * factorial(n - 1) * if m == n { 2 } else { 1 };
        Ok(SearchSpace {
            m,
            n,
            k,
            letter_pool: pool as usize,
            final_choices: ((1 << m) - 2) * ((1 << n) - 2),
            symmetry,
            bound: bound_f_u64(m, n)?,
        })
    }

    /// Exact number of letter multisets visited in `mode`.
    pub fn multisets(&self, mode: SearchMode) -> u128 {
        let (pool, k) = (self.letter_pool as u128, self.k as u128);
        match mode {
            SearchMode::Exhaustive => binomial(pool + k - 1, k),
            SearchMode::BoundTargeted => {
                // the pool splits into m·n equal classes by the image of (1,1);
                // all classes but the identity one must be used
                let classes = self.m * self.n;
                let size = pool / classes as u128;
                let pick = |j: usize| binomial(size + j as u128 - 1, j as u128);
                let mut ways = vec![0u128; self.k + 1];
                for (j, w) in ways.iter_mut().enumerate() {
                    *w = pick(j);
                }
                for _ in 1..classes {
                    let mut next = vec![0u128; self.k + 1];
                    for (used, &w) in ways.iter().enumerate() {
                        for j in 1..=self.k - used {
                            next[used + j] =
                                next[used + j].saturating_add(w.saturating_mul(pick(j)));
                        }
                    }
                    ways = next;
                }
                ways[self.k]
            }
        }
    }

    /// Estimated candidate evaluations: multisets times final-set choices,
    /// divided by the relabeling symmetry.
    pub fn volume(&self, mode: SearchMode) -> u128 {
        self.multisets(mode)
            .saturating_mul(self.final_choices as u128)
            .div_ceil(self.symmetry as u128)
    }

    fn check_volume(&self, mode: SearchMode) -> Result<()> {
        let volume = self.volume(mode);
        if volume > SEARCH_VOLUME_GUARD {
            return Err(Error::guard(
                "search volume (estimated candidate evaluations)",
                SEARCH_VOLUME_GUARD,
                volume,
            ));
        }
        Ok(())
    }
}

/// Result of a search run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub mode: SearchMode,
    /// Largest `κ(K ⧢ L)` among evaluated candidates.
    pub max: usize,
    pub bound: u64,
    pub met: bool,
    pub multisets: u64,
    pub candidates_evaluated: u64,
    /// Number of canonical pairs attaining `max`.
    pub witness_count: usize,
    /// Number of their transition structures up to isomorphism, final
    /// sets ignored.
    pub structure_count: usize,
    /// The first canonical witnesses, up to the requested cap.
    pub witnesses: Vec<PairForm>,
}

impl SearchResult {
    pub fn witness_pairs(&self) -> Vec<WitnessPair> {
        self.witnesses.iter().map(PairForm::to_pair).collect()
    }
}

fn search(
    space: &SearchSpace,
    opts: EngineOptions,
    cap: usize,
) -> Result<(SearchResult, Vec<PairForm>)> {
    space.check_volume(opts.mode)?;
    let outcome = run(space, opts);
    let result = SearchResult {
        m: space.m,
        n: space.n,
        k: space.k,
        mode: opts.mode,
        max: outcome.best,
        bound: space.bound,
        met: outcome.best as u64 == space.bound,
        multisets: outcome.multisets,
        candidates_evaluated: outcome.evaluated,
        witness_count: outcome.witnesses.len(),
        structure_count: structure_count(&outcome.witnesses),
        witnesses: outcome.witnesses.iter().take(cap).cloned().collect(),
    };
    // every reported witness is recomputed through the general route
    for w in &result.witnesses {
        let pair = w.to_pair();
        let kappa = shuffle_state_complexity(&pair.left, &pair.right)?;
        if kappa != result.max {
            return Err(Error::Invariant(format!(
                "witness {w:?} recomputes to {kappa}, not {}",
                result.max
            )));
        }
    }
    Ok((result, outcome.witnesses))
}

fn structure_count(witnesses: &[PairForm]) -> usize {
    let mut structures: Vec<PairForm> = witnesses.iter().map(PairForm::structure).collect();
    structures.sort();
    structures.dedup();
    structures.len()
}

/// One search in the given mode, reporting up to `cap` witnesses.
pub fn run_search(
    m: usize,
    n: usize,
    k: usize,
    mode: SearchMode,
    cap: usize,
) -> Result<SearchResult> {
    let space = SearchSpace::new(m, n, k)?;
    let opts = EngineOptions {
        mode,
        stop_at_bound: false,
        prune_below_best: true,
    };
    Ok(search(&space, opts, cap)?.0)
}

/// Exact maximum of `κ(K ⧢ L)` over the space, with up to `cap` canonical
/// witnesses. The bound-targeted space is searched first; the full space
/// only when the bound is not met there.
pub fn max_shuffle_complexity(m: usize, n: usize, k: usize, cap: usize) -> Result<SearchResult> {
    let targeted = run_search(m, n, k, SearchMode::BoundTargeted, cap)?;
    if targeted.met {
        return Ok(targeted);
    }
    run_search(m, n, k, SearchMode::Exhaustive, cap)
}

/// Whether some pair over `k` letters meets the bound; stops at the first.
pub fn bound_reachable_with(m: usize, n: usize, k: usize) -> Result<bool> {
    let space = SearchSpace::new(m, n, k)?;
    let opts = EngineOptions {
        mode: SearchMode::BoundTargeted,
        stop_at_bound: true,
        prune_below_best: false,
    };
    Ok(search(&space, opts, 1)?.0.met)
}

/// Smallest `k` in `range` for which some pair meets the bound.
pub fn min_witness_alphabet(
    m: usize,
    n: usize,
    range: RangeInclusive<usize>,
) -> Result<Option<usize>> {
    for k in range.filter(|&k| k > 0) {
        if bound_reachable_with(m, n, k)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// How right-hand DFAs of witness pairs are identified when counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RightIsomorphism {
    /// State relabeling and letter renaming of the right DFA alone.
    PerDfa,
    /// State relabeling only, letters in the order fixed by the canonical pair.
    Joint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightCountOptions {
    /// Identify right DFAs that differ only in their final states.
    pub ignore_finals: bool,
    pub isomorphism: RightIsomorphism,
}

impl Default for RightCountOptions {
    fn default() -> Self {
        Self {
            ignore_finals: false,
            isomorphism: RightIsomorphism::PerDfa,
        }
    }
}

/// Number of non-isomorphic right DFAs among the canonical witness pairs
/// meeting the bound over `k` letters.
pub fn count_nonisomorphic_witness_right_dfas(
    m: usize,
    n: usize,
    k: usize,
    opts: RightCountOptions,
) -> Result<usize> {
    let space = SearchSpace::new(m, n, k)?;
    let engine = EngineOptions {
        mode: SearchMode::BoundTargeted,
        stop_at_bound: false,
        prune_below_best: true,
    };
    let (result, witnesses) = search(&space, engine, 0)?;
    if !result.met {
        return Ok(0);
    }
    Ok(count_right_dfas(&witnesses, opts))
}

/// Number of non-isomorphic right DFAs among the given pairs.
pub fn count_right_dfas(witnesses: &[PairForm], opts: RightCountOptions) -> usize {
    let mut forms: Vec<CanonicalForm> = witnesses
        .iter()
        .map(|w| {
            let mut right = w.to_pair().right;
            if opts.ignore_finals {
                right = right
                    .with_finals(&[])
                    .expect("the empty final set is valid");
            }
            match opts.isomorphism {
                RightIsomorphism::PerDfa => canonicalize(&right),
                RightIsomorphism::Joint => canonicalize_fixed_letters(&right),
            }
        })
        .collect();
    forms.sort();
    forms.dedup();
    forms.len()
}
