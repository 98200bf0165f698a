//! Whether a list of letters of `D_{m,n}` reaches every valid subset, and
//! a greedy construction of such a list.

use crate::error::{Error, Result};
use crate::reach::bfs::{bfs_reach, reached_set, AlphabetSpec, ReachOptions};
use crate::reach::letter::{full_alphabet, ExtremalLetter};
use crate::shuffle::bound_f_u64;

/// Largest `(number of candidate letters) × f(m,n)` per greedy round.
pub const GREEDY_WORK_GUARD: u128 = 100_000_000;

/// True when the letters reach every valid subset of the grid.
pub fn alphabet_sufficiency(m: usize, n: usize, letters: &[ExtremalLetter]) -> Result<bool> {
    let report = bfs_reach(
        m,
        n,
        &AlphabetSpec::Letters(letters.to_vec()),
        &ReachOptions::default(),
    )?;
    Ok(report.complete)
}

/// Adds, one at a time, the letter of the full alphabet that reaches the
/// most new subsets (the lexicographically first on ties) until every
/// valid subset is reached. Makes no minimality claim.
///
/// Some letter always gains while the reached set is incomplete: the full
/// alphabet reaches everything, so some letter leaves the reached set.
pub fn greedy_alphabet(m: usize, n: usize) -> Result<Vec<ExtremalLetter>> {
    let bound = bound_f_u64(m, n)?;
    let candidates: Vec<ExtremalLetter> = full_alphabet(m, n).collect();
    let work = candidates.len() as u128 * bound as u128;
    if work > GREEDY_WORK_GUARD {
        return Err(Error::guard(
            "greedy work per round (letters x f(m,n))",
            GREEDY_WORK_GUARD,
            work,
        ));
    }
    let count = |letters: &[&ExtremalLetter]| -> u64 {
        reached_set(m, n, letters)
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum()
    };
    let mut chosen: Vec<&ExtremalLetter> = Vec::new();
    let mut reached = count(&chosen);
    while reached < bound {
        let mut best: Option<(u64, &ExtremalLetter)> = None;
        for a in &candidates {
            chosen.push(a);
            let r = count(&chosen);
            chosen.pop();
            if best.is_none_or(|(b, _)| r > b) {
                best = Some((r, a));
            }
        }
        let (r, a) = best.expect("the full alphabet is nonempty");
        if r <= reached {
            return Err(Error::Invariant(format!(
                "greedy round gained nothing at {reached} of {bound}"
            )));
        }
        chosen.push(a);
        reached = r;
    }
    Ok(chosen.into_iter().cloned().collect())
}

/// Drops letters whose removal keeps the list sufficient, scanning from
/// the last letter to the first.
pub fn prune_alphabet(
    m: usize,
    n: usize,
    letters: &[ExtremalLetter],
) -> Result<Vec<ExtremalLetter>> {
    let bound = bound_f_u64(m, n)?;
    let mut kept: Vec<ExtremalLetter> = letters.to_vec();
    for i in (0..kept.len()).rev() {
        let without: Vec<&ExtremalLetter> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, a)| a)
            .collect();
        let reached: u64 = reached_set(m, n, &without)
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        if reached == bound {
            kept.remove(i);
        }
    }
    Ok(kept)
}
