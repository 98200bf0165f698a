//! Direct reachability from smaller subsets: for a valid `S`, a valid `T`
//! with `|T| < |S|` and a letter `a` with `T·a = S`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automata::{AllTransformations, Transformation};
use crate::error::{Error, Result};
use crate::reach::letter::ExtremalLetter;
use crate::shuffle::{first_column_mask, is_valid_bits, row_of, ProductSubset};

/// Largest `m·n` accepted by [`direct_smaller_check`].
pub const DIRECT_SMALLER_GRID_GUARD: usize = 16;
/// Subsets smaller than this are outside the claim (`{(1,1)}` and the
/// two-element subsets reached from it).
pub const DIRECT_SMALLER_MIN_SIZE: usize = 3;
/// Number of exceptions listed in a report.
pub const EXCEPTION_SAMPLE: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectSmallerReport {
    pub m: usize,
    pub n: usize,
    /// Valid subsets of size at least [`DIRECT_SMALLER_MIN_SIZE`].
    pub checked: u64,
    pub covered: u64,
    pub exception_count: u64,
    pub exceptions: Vec<String>,
}

impl DirectSmallerReport {
    pub fn passed(&self) -> bool {
        self.exception_count == 0
    }
}

/// Preimage structure of `S` under one letter: the elements `(p,q)` whose
/// image under the letter lies inside `S`, each with the (one or two)
/// elements of `S` it produces.
fn candidates(bits: u64, m: usize, n: usize, s: &[u32], t: &[u32]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for p in 0..m {
        for q in 0..n {
            let a = 1u64 << (s[p] as usize * n + q);
            let b = 1u64 << (p * n + t[q] as usize);
            if bits & a != 0 && bits & b != 0 {
                out.push((1u64 << (p * n + q), a | b));
            }
        }
    }
    out
}

struct CoverSearch<'a> {
    target: u64,
    m: usize,
    n: usize,
    cands: &'a [(u64, u64)],
    budget: u32,
}

impl CoverSearch<'_> {
    /// Covers `target` by candidates chosen for successive uncovered
    /// elements; every cover contains such an irredundant part, and a
    /// valid cover needs at most two more elements (for row 1 and column 1).
    fn search(&self, chosen: u64, covered: u64) -> Option<u64> {
        if chosen.count_ones() > self.budget {
            return None;
        }
        let uncovered = self.target & !covered;
        if uncovered == 0 {
            return self.complete(chosen);
        }
        let x = uncovered & uncovered.wrapping_neg();
        for &(elem, image) in self.cands {
            if image & x != 0 && chosen & elem == 0 {
                if let Some(t) = self.search(chosen | elem, covered | image) {
                    return Some(t);
                }
            }
        }
        None
    }

    fn complete(&self, chosen: u64) -> Option<u64> {
        let (m, n) = (self.m, self.n);
        let pool = self.cands.iter().fold(0u64, |a, &(e, _)| a | e);
        let row1 = row_of(pool, n, 0);
        let col1 = pool & first_column_mask(m, n);
        let fits = |t: u64| t.count_ones() <= self.budget && is_valid_bits(t, m, n);
        if fits(chosen) {
            return Some(chosen);
        }
        let mut extras: Vec<u64> = Vec::new();
        extras.extend((0..n).filter(|&q| row1 >> q & 1 == 1).map(|q| 1u64 << q));
        extras.extend((0..m).map(|p| 1u64 << (p * n)).filter(|&e| col1 & e != 0));
        for &e in &extras {
            if fits(chosen | e) {
                return Some(chosen | e);
            }
        }
        for &e in &extras {
            for &f in &extras {
                if fits(chosen | e | f) {
                    return Some(chosen | e | f);
                }
            }
        }
        None
    }
}

/// Finds a valid `T` with `|T| < |S|` and a letter `a` with `T·a = S`,
/// trying letters in lexicographic order.
pub fn direct_predecessor(s: &ProductSubset) -> Option<(ProductSubset, ExtremalLetter)> {
    let (m, n) = (s.m(), s.n());
    let rows: Vec<Transformation> = AllTransformations::new(m).collect();
    let cols: Vec<Transformation> = AllTransformations::new(n).collect();
    predecessor_bits(s.bits(), m, n, &rows, &cols).map(|(t, a, b)| {
        (
            ProductSubset::raw(m, n, t),
            ExtremalLetter::new(rows[a].clone(), cols[b].clone()),
        )
    })
}

fn predecessor_bits(
    bits: u64,
    m: usize,
    n: usize,
    rows: &[Transformation],
    cols: &[Transformation],
) -> Option<(u64, usize, usize)> {
    let size = bits.count_ones();
    if size < 2 {
        return None;
    }
    for (a, s) in rows.iter().enumerate() {
        for (b, t) in cols.iter().enumerate() {
            let cands = candidates(bits, m, n, s.indices(), t.indices());
            let reach = cands.iter().fold(0u64, |acc, &(_, img)| acc | img);
            if reach != bits || cands.iter().all(|&(_, img)| img.count_ones() < 2) {
                continue;
            }
            let search = CoverSearch {
                target: bits,
                m,
                n,
                cands: &cands,
                budget: size - 1,
            };
            if let Some(t) = search.search(0, 0) {
                return Some((t, a, b));
            }
        }
    }
    None
}

/// Checks every valid subset of size at least three for a direct
/// predecessor among smaller valid subsets.
pub fn direct_smaller_check(m: usize, n: usize) -> Result<DirectSmallerReport> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("grid dimensions must be positive"));
    }
    if m * n > DIRECT_SMALLER_GRID_GUARD {
        return Err(Error::guard(
            "grid cells m*n (direct-smaller check)",
            DIRECT_SMALLER_GRID_GUARD as u128,
            (m * n) as u128,
        ));
    }
    let rows: Vec<Transformation> = AllTransformations::new(m).collect();
    let cols: Vec<Transformation> = AllTransformations::new(n).collect();
    let subsets: Vec<u64> = (0..1u64 << (m * n))
        .filter(|&b| is_valid_bits(b, m, n) && b.count_ones() as usize >= DIRECT_SMALLER_MIN_SIZE)
        .collect();
    let mut exceptions: Vec<u64> = subsets
        .par_iter()
        .filter(|&&b| predecessor_bits(b, m, n, &rows, &cols).is_none())
        .copied()
        .collect();
    exceptions.sort_unstable();
    let checked = subsets.len() as u64;
    let exception_count = exceptions.len() as u64;
    Ok(DirectSmallerReport {
        m,
        n,
        checked,
        covered: checked - exception_count,
        exception_count,
        exceptions: exceptions
            .iter()
            .take(EXCEPTION_SAMPLE)
            .map(|&b| ProductSubset::raw(m, n, b).to_string())
            .collect(),
    })
}
