use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest grid handled by the fixed-width subset encoding.
pub const MAX_GRID_CELLS: usize = 64;

/// A subset of `Q_m × Q_n`, with `(p, q)` stored at bit `(p−1)·n + (q−1)`.
///
/// Rows are therefore contiguous runs of `n` bits, which the hot loops in
/// the reachability code rely on.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductSubset {
    m: u8,
    n: u8,
    bits: u64,
}

impl ProductSubset {
    pub fn empty(m: usize, n: usize) -> Result<Self> {
        check_grid(m, n)?;
        Ok(Self {
            m: m as u8,
            n: n as u8,
            bits: 0,
        })
    }

    /// Wraps an encoded subset; rejects bits at or above `m·n`.
    pub fn from_bits(m: usize, n: usize, bits: u64) -> Result<Self> {
        check_grid(m, n)?;
        if bits & !grid_mask(m, n) != 0 {
            return Err(Error::invalid(format!(
                "subset {bits} has bits outside a {m}x{n} grid"
            )));
        }
        Ok(Self {
            m: m as u8,
            n: n as u8,
            bits,
        })
    }

    /// Internal constructor; the caller guarantees the grid and bit range.
    #[inline]
    pub(crate) fn raw(m: usize, n: usize, bits: u64) -> Self {
        debug_assert!(m * n <= MAX_GRID_CELLS && bits & !grid_mask(m, n) == 0);
        Self {
            m: m as u8,
            n: n as u8,
            bits,
        }
    }

    /// Builds a subset from 1-based `(row, column)` pairs.
    pub fn from_pairs(m: usize, n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut s = Self::empty(m, n)?;
        for &(p, q) in pairs {
            if p == 0 || p > m || q == 0 || q > n {
                return Err(Error::invalid(format!("({p},{q}) outside a {m}x{n} grid")));
            }
            s.insert(p, q);
        }
        Ok(s)
    }

    /// Builds a subset from its columns: `columns[j]` lists the 1-based rows
    /// present in column `j+1`.
    pub fn from_columns(m: usize, columns: &[Vec<usize>]) -> Result<Self> {
        let n = columns.len();
        let pairs: Vec<(usize, usize)> = columns
            .iter()
            .enumerate()
            .flat_map(|(j, rows)| rows.iter().map(move |&i| (i, j + 1)))
            .collect();
        Self::from_pairs(m, n, &pairs)
    }

    pub fn m(&self) -> usize {
        self.m as usize
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Bit index of the 1-based pair `(p, q)`.
    #[inline]
    pub fn index(&self, p: usize, q: usize) -> usize {
        (p - 1) * self.n() + (q - 1)
    }

    pub fn contains(&self, p: usize, q: usize) -> bool {
        self.bits >> self.index(p, q) & 1 == 1
    }

    pub fn insert(&mut self, p: usize, q: usize) {
        assert!(
            p >= 1 && p <= self.m() && q >= 1 && q <= self.n(),
            "({p},{q}) out of range"
        );
        self.bits |= 1 << self.index(p, q);
    }

    pub fn remove(&mut self, p: usize, q: usize) {
        self.bits &= !(1 << self.index(p, q));
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Members as 1-based pairs in encoding order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        iter_bits(self.bits)
            .map(|i| (i / n + 1, i % n + 1))
            .collect()
    }

    /// Column bitmask (bit `q−1`) of row `p`.
    #[inline]
    pub fn row(&self, p: usize) -> u64 {
        row_of(self.bits, self.n(), p - 1)
    }

    /// Row bitmask (bit `p−1`) of column `q`.
    pub fn column(&self, q: usize) -> u64 {
        column_of(self.bits, self.m(), self.n(), q - 1)
    }

    /// Condition (C): some state in column 1 and some state in row 1.
    pub fn is_valid(&self) -> bool {
        is_valid_bits(self.bits, self.m(), self.n())
    }

    /// Occupied rows and occupied columns, both 1-based and increasing.
    pub fn projections(&self) -> (Vec<usize>, Vec<usize>) {
        let (m, n) = (self.m(), self.n());
        let rows = (1..=m).filter(|&p| self.row(p) != 0).collect();
        let cols = (1..=n).filter(|&q| self.column(q) != 0).collect();
        (rows, cols)
    }
}

impl fmt::Debug for ProductSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ProductSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (p, q)) in self.pairs().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({p},{q})")?;
        }
        write!(f, "}}")
    }
}

fn check_grid(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("grid dimensions must be positive"));
    }
    if m * n > MAX_GRID_CELLS {
        return Err(Error::guard(
            "grid cells m*n",
            MAX_GRID_CELLS as u128,
            (m * n) as u128,
        ));
    }
    Ok(())
}

/// Mask of the `m·n` valid bit positions.
#[inline]
pub fn grid_mask(m: usize, n: usize) -> u64 {
    low_bits(m * n)
}

#[inline]
pub(crate) fn low_bits(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Mask of column 1 (bit 0 of every row).
#[inline]
pub fn first_column_mask(m: usize, n: usize) -> u64 {
    (0..m).fold(0, |acc, p| acc | 1 << (p * n))
}

/// Condition (C) on raw bits.
#[inline]
pub fn is_valid_bits(bits: u64, m: usize, n: usize) -> bool {
    bits & low_bits(n) != 0 && bits & first_column_mask(m, n) != 0
}

/// Column bitmask of the 0-based row `p`.
#[inline]
pub(crate) fn row_of(bits: u64, n: usize, p: usize) -> u64 {
    bits >> (p * n) & low_bits(n)
}

/// Row bitmask of the 0-based column `q`.
#[inline]
pub(crate) fn column_of(bits: u64, m: usize, n: usize, q: usize) -> u64 {
    (0..m).fold(0, |acc, p| acc | (bits >> (p * n + q) & 1) << p)
}

/// Set bit positions in increasing order.
pub(crate) fn iter_bits(mut bits: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            return None;
        }
        let i = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        Some(i)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_is_row_major() {
        let s = ProductSubset::from_pairs(3, 4, &[(1, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(s.bits(), 1 | 1 << 6 | 1 << 11);
        assert_eq!(s.pairs(), vec![(1, 1), (2, 3), (3, 4)]);
        assert_eq!(s.row(2), 0b0100);
        assert_eq!(s.column(3), 0b010);
        assert_eq!(s.to_string(), "{(1,1),(2,3),(3,4)}");
    }

    #[test]
    fn validity_examples() {
        assert!(ProductSubset::from_pairs(2, 2, &[(1, 1)])
            .unwrap()
            .is_valid());
        assert!(ProductSubset::from_pairs(3, 3, &[(2, 1), (1, 3)])
            .unwrap()
            .is_valid());
        assert!(!ProductSubset::from_pairs(3, 3, &[(2, 2)])
            .unwrap()
            .is_valid());
        assert!(!ProductSubset::from_pairs(3, 3, &[(2, 1)])
            .unwrap()
            .is_valid());
        assert!(!ProductSubset::empty(2, 2).unwrap().is_valid());
    }

    #[test]
    fn projections_examples() {
        let s = ProductSubset::from_pairs(2, 2, &[(1, 1)]).unwrap();
        assert_eq!(s.projections(), (vec![1], vec![1]));
        let e = ProductSubset::empty(3, 3).unwrap();
        assert_eq!(e.projections(), (vec![], vec![]));
    }

    #[test]
    fn rejects_out_of_grid() {
        assert!(ProductSubset::from_bits(2, 2, 1 << 4).is_err());
        assert!(ProductSubset::from_pairs(2, 2, &[(3, 1)]).is_err());
        assert!(ProductSubset::empty(9, 8).is_err());
        assert!(ProductSubset::from_bits(8, 8, u64::MAX).is_ok());
    }
}
