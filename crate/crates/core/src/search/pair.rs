//! Canonical forms of DFA pairs over a shared alphabet.
//!
//! A pair with initial state 1 on both sides is a multiset of letters
//! `(s, t)` plus two final sets. Sorting the letter codes removes letter
//! renamings; the least image under relabelings of the non-initial states
//! (and, for `m = n`, exchanging the operands, since shuffle commutes)
//! removes the rest.

use serde::{Deserialize, Serialize};

use crate::automata::{all_permutations, Dfa, Transformation};
use crate::error::{Error, Result};
use crate::reach::encode;

/// Canonical form of a DFA pair: sorted letter codes and final-set masks.
///
/// A letter code is `code(s)·n^n + code(t)` where `code` reads the 0-based
/// images as a base-`m` (base-`n`) number, first state most significant.
/// Bit `i` of a final mask stands for state `i+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairForm {
    pub m: usize,
    pub n: usize,
    pub codes: Vec<u32>,
    pub left_finals: u32,
    pub right_finals: u32,
}

/// A witness pair as two DFAs over the letters `a, b, c, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPair {
    pub left: Dfa,
    pub right: Dfa,
}

/// `m^m · n^n`, the number of letters `(s, t)`.
pub(crate) fn pool_size(m: usize, n: usize) -> Option<u128> {
    (m as u128)
        .checked_pow(m as u32)?
        .checked_mul((n as u128).checked_pow(n as u32)?)
}

pub(crate) fn pow(base: usize, exp: usize) -> usize {
    (0..exp).fold(1, |acc, _| acc * base)
}

fn decode_images(len: usize, mut code: usize) -> Vec<u32> {
    let mut images = vec![0u32; len];
    for slot in images.iter_mut().rev() {
        *slot = (code % len) as u32;
        code /= len;
    }
    images
}

/// Splits a pair letter code into its row and column transformations.
pub(crate) fn letter_images(m: usize, n: usize, code: u32) -> (Vec<u32>, Vec<u32>) {
    let cols = pow(n, n);
    let code = code as usize;
    (decode_images(m, code / cols), decode_images(n, code % cols))
}

pub(crate) fn letter_code(n: usize, s: &[u32], t: &[u32]) -> u32 {
    encode(s) * pow(n, n) as u32 + encode(t)
}

fn mask_of(states: impl IntoIterator<Item = usize>) -> u32 {
    states.into_iter().fold(0, |acc, q| acc | 1 << q)
}

impl PairForm {
    pub fn letter_count(&self) -> usize {
        self.codes.len()
    }

    /// Canonical form of the transition structure alone: final sets are
    /// cleared before taking the least image.
    pub fn structure(&self) -> PairForm {
        let bare = PairForm {
            left_finals: 0,
            right_finals: 0,
            ..self.clone()
        };
        least_image(&bare)
    }

    /// The pair as DFAs with initial state 1 over `a, b, c, ...`.
    pub fn to_pair(&self) -> WitnessPair {
        let alphabet: Vec<String> = (0..self.codes.len())
            .map(|i| char::from(b'a' + i as u8).to_string())
            .collect();
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for &code in &self.codes {
            let (s, t) = letter_images(self.m, self.n, code);
            left.push(Transformation::from_indices(s));
            right.push(Transformation::from_indices(t));
        }
        let finals = |mask: u32, len: usize| -> Vec<usize> {
            (0..len)
                .filter(|&q| mask >> q & 1 == 1)
                .map(|q| q + 1)
                .collect()
        };
        let left = Dfa::new(alphabet.clone(), left, 1, &finals(self.left_finals, self.m))
            .expect("pair forms hold well-formed transformations");
        let right = Dfa::new(alphabet, right, 1, &finals(self.right_finals, self.n))
            .expect("pair forms hold well-formed transformations");
        WitnessPair { left, right }
    }
}

/// One relabeling of a pair: `rows` permutes the left states, `cols` the
/// right states (both fix state 1), and `swap` exchanges the operands.
pub(crate) struct Relabeling {
    /// Image code of every letter code.
    pub code: Vec<u32>,
    rows: Vec<u32>,
    cols: Vec<u32>,
    swap: bool,
}

fn map_mask(perm: &[u32], mask: u32) -> u32 {
    mask_of(
        (0..perm.len())
            .filter(|&q| mask >> q & 1 == 1)
            .map(|q| perm[q] as usize),
    )
}

fn conjugate(perm: &[u32], t: &[u32]) -> Vec<u32> {
    // t' = perm ∘ t ∘ perm⁻¹, so t'(perm(q)) = perm(t(q))
    let mut out = vec![0u32; t.len()];
    for q in 0..t.len() {
        out[perm[q] as usize] = perm[t[q] as usize];
    }
    out
}

impl Relabeling {
    /// Image of the final masks.
    pub fn finals(&self, left: u32, right: u32) -> (u32, u32) {
        let (l, r) = (map_mask(&self.rows, left), map_mask(&self.cols, right));
        if self.swap {
            (r, l)
        } else {
            (l, r)
        }
    }

    pub fn letter(&self, m: usize, n: usize, code: u32) -> u32 {
        let (s, t) = letter_images(m, n, code);
        let (s, t) = (conjugate(&self.rows, &s), conjugate(&self.cols, &t));
        if self.swap {
            letter_code(m, &t, &s)
        } else {
            letter_code(n, &s, &t)
        }
    }
}

/// Permutations of `0..len` fixing 0.
fn fixing_first(len: usize) -> Vec<Vec<u32>> {
    if len <= 1 {
        return vec![(0..len as u32).collect()];
    }
    all_permutations(len - 1)
        .map(|p| {
            std::iter::once(0)
                .chain(p.indices().iter().map(|&i| i + 1))
                .collect()
        })
        .collect()
}

/// All relabelings except the identity. Letter tables are filled when
/// `pool` is given (codes `0..pool`).
pub(crate) fn relabelings(m: usize, n: usize, pool: Option<usize>) -> Vec<Relabeling> {
    let mut out = Vec::new();
    let swaps: &[bool] = if m == n { &[false, true] } else { &[false] };
    for &swap in swaps {
        for rows in fixing_first(m) {
            for cols in fixing_first(n) {
                let identity = !swap
                    && rows.iter().enumerate().all(|(i, &p)| p as usize == i)
                    && cols.iter().enumerate().all(|(i, &q)| q as usize == i);
                if identity {
                    continue;
                }
                let mut g = Relabeling {
                    code: Vec::new(),
                    rows: rows.clone(),
                    cols,
                    swap,
                };
                if let Some(pool) = pool {
                    g.code = (0..pool as u32).map(|c| g.letter(m, n, c)).collect();
                }
                out.push(g);
            }
        }
    }
    out
}

/// Canonical form of the pair `(k, l)`. The right DFA's letters are
/// matched to the left alphabet by name.
pub fn canonical_pair(k: &Dfa, l: &Dfa) -> Result<PairForm> {
    let l = if k.alphabet() == l.alphabet() {
        l.clone()
    } else {
        l.reorder_alphabet(k.alphabet())?
    };
    let (m, n) = (k.state_count(), l.state_count());
    if pool_size(m, n).is_none_or(|p| p > u32::MAX as u128) {
        return Err(Error::invalid(format!(
            "letter codes for {m} and {n} states do not fit in 32 bits"
        )));
    }
    let initial_first = |d: &Dfa| -> Dfa {
        let q0 = d.initial_index();
        let order: Vec<usize> = std::iter::once(q0)
            .chain((0..d.state_count()).filter(|&q| q != q0))
            .collect();
        d.relabel(&order)
    };
    let (k, l) = (initial_first(k), initial_first(&l));
    let mut codes: Vec<u32> = (0..k.letter_count())
        .map(|a| letter_code(n, k.delta(a).indices(), l.delta(a).indices()))
        .collect();
    codes.sort_unstable();
    let left_finals = mask_of((0..m).filter(|&q| k.is_final_index(q)));
    let right_finals = mask_of((0..n).filter(|&q| l.is_final_index(q)));
    Ok(least_image(&PairForm {
        m,
        n,
        codes,
        left_finals,
        right_finals,
    }))
}

/// Least image of a form with sorted codes under all relabelings.
fn least_image(given: &PairForm) -> PairForm {
    let (m, n) = (given.m, given.n);
    let mut best = given.clone();
    for g in relabelings(m, n, None) {
        let mut codes: Vec<u32> = given.codes.iter().map(|&c| g.letter(m, n, c)).collect();
        codes.sort_unstable();
        let (left_finals, right_finals) = g.finals(given.left_finals, given.right_finals);
        let image = PairForm {
            m,
            n,
            codes,
            left_finals,
            right_finals,
        };
        if image < best {
            best = image;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(images: &[usize]) -> Transformation {
        Transformation::new(images).unwrap()
    }

    fn names(k: usize) -> Vec<String> {
        (0..k)
            .map(|i| char::from(b'a' + i as u8).to_string())
            .collect()
    }

    #[test]
    fn letter_codes_round_trip() {
        for code in 0..(4 * 27) {
            let (s, t) = letter_images(2, 3, code);
            assert_eq!(letter_code(3, &s, &t), code);
        }
        assert_eq!(letter_images(2, 3, 0), (vec![0, 0], vec![0, 0, 0]));
    }

    #[test]
    fn relabeling_and_renaming_give_the_same_form() {
        let k = Dfa::new(names(2), vec![t(&[2, 1]), t(&[1, 1])], 1, &[2]).unwrap();
        let l = Dfa::new(names(2), vec![t(&[2, 3, 1]), t(&[1, 3, 3])], 1, &[3]).unwrap();
        let form = canonical_pair(&k, &l).unwrap();
        // exchange states 2 and 3 of l, and the two letters
        let l2 = Dfa::new(names(2), vec![t(&[1, 2, 2]), t(&[3, 1, 2])], 1, &[2]).unwrap();
        let k2 = Dfa::new(names(2), vec![t(&[1, 1]), t(&[2, 1])], 1, &[2]).unwrap();
        assert_eq!(canonical_pair(&k2, &l2).unwrap(), form);
        // a different final set is a different pair
        let l3 = l.with_finals(&[2]).unwrap();
        assert_ne!(canonical_pair(&k, &l3).unwrap(), form);
    }

    #[test]
    fn non_initial_start_is_normalized() {
        let k = Dfa::new(names(1), vec![t(&[2, 1])], 2, &[1]).unwrap();
        let k1 = Dfa::new(names(1), vec![t(&[2, 1])], 1, &[2]).unwrap();
        let l = Dfa::new(names(1), vec![t(&[1, 1])], 1, &[2]).unwrap();
        assert_eq!(
            canonical_pair(&k, &l).unwrap(),
            canonical_pair(&k1, &l).unwrap()
        );
    }

    #[test]
    fn square_pairs_are_symmetric() {
        let k = Dfa::new(names(2), vec![t(&[2, 2]), t(&[1, 1])], 1, &[2]).unwrap();
        let l = Dfa::new(names(2), vec![t(&[2, 1]), t(&[2, 2])], 1, &[1]).unwrap();
        assert_eq!(
            canonical_pair(&k, &l).unwrap(),
            canonical_pair(&l, &k).unwrap()
        );
    }

    #[test]
    fn forms_convert_back() {
        let k = Dfa::new(names(2), vec![t(&[2, 1]), t(&[1, 1])], 1, &[2]).unwrap();
        let l = Dfa::new(names(2), vec![t(&[2, 3, 1]), t(&[1, 3, 3])], 1, &[3]).unwrap();
        let form = canonical_pair(&k, &l).unwrap();
        let pair = form.to_pair();
        assert_eq!(canonical_pair(&pair.left, &pair.right).unwrap(), form);
    }
}
