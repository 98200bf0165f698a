use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::automata::{AllTransformations, Transformation};
use crate::error::{Error, Result};
use crate::shuffle::{row_of, ProductSubset};

/// A letter `a_{s,t}` of the extremal automaton: `s` acts on the rows
/// `Q_m`, `t` on the columns `Q_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtremalLetter {
    pub s: Transformation,
    pub t: Transformation,
}

impl ExtremalLetter {
    pub fn new(s: Transformation, t: Transformation) -> Self {
        Self { s, t }
    }

    /// Builds a letter from 1-based image lists.
    pub fn from_images(s: &[usize], t: &[usize]) -> Result<Self> {
        Ok(Self {
            s: Transformation::new(s)?,
            t: Transformation::new(t)?,
        })
    }

    pub fn m(&self) -> usize {
        self.s.len()
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    /// Packs both transformations as base-`m` / base-`n` numbers, first
    /// state most significant, so code order is lexicographic image order.
    pub fn codes(&self) -> (u32, u32) {
        (encode(self.s.indices()), encode(self.t.indices()))
    }

    pub fn from_codes(m: usize, n: usize, s: u32, t: u32) -> Self {
        Self {
            s: decode(m, s),
            t: decode(n, t),
        }
    }
}

pub(crate) fn encode(images: &[u32]) -> u32 {
    let base = images.len() as u32;
    images.iter().fold(0, |acc, &i| acc * base + i)
}

pub(crate) fn decode(len: usize, mut code: u32) -> Transformation {
    let base = len as u32;
    let mut images = vec![0u32; len];
    for slot in images.iter_mut().rev() {
        *slot = code % base;
        code /= base;
    }
    Transformation::from_indices(images)
}

/// `S·a = {(ps, q)} ∪ {(p, qt)}` over `(p, q) ∈ S`, on raw encodings.
#[inline]
pub(crate) fn step_bits(bits: u64, m: usize, n: usize, s: &[u32], t: &[u32]) -> u64 {
    let mut out = 0u64;
    for p in 0..m {
        let row = row_of(bits, n, p);
        if row == 0 {
            continue;
        }
        out |= row << (s[p] as usize * n);
        let mut image = 0u64;
        let mut rest = row;
        while rest != 0 {
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            image |= 1 << t[q];
        }
        out |= image << (p * n);
    }
    out
}

/// One step of the extremal subset automaton `D_{m,n}`.
pub fn extremal_step(s: &ProductSubset, a: &ExtremalLetter) -> Result<ProductSubset> {
    let (m, n) = (s.m(), s.n());
    if a.m() != m || a.n() != n {
        return Err(Error::invalid(format!(
            "letter acts on {}x{} but the subset lives in {m}x{n}",
            a.m(),
            a.n()
        )));
    }
    let bits = step_bits(s.bits(), m, n, a.s.indices(), a.t.indices());
    ProductSubset::from_bits(m, n, bits)
}

/// The full alphabet `T_m × T_n` in lexicographic order of `(s, t)` images,
/// generated lazily.
pub fn full_alphabet(m: usize, n: usize) -> impl Iterator<Item = ExtremalLetter> {
    AllTransformations::new(m).flat_map(move |s| {
        AllTransformations::new(n).map(move |t| ExtremalLetter::new(s.clone(), t))
    })
}

/// Parses a letter-list document: a JSON array of `{"s": [..], "t": [..]}`.
pub fn parse_letters(text: &str, m: usize, n: usize) -> Result<Vec<ExtremalLetter>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let items = value
        .as_array()
        .ok_or_else(|| Error::field("<root>", "expected an array of letters"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let letter: ExtremalLetter = serde_json::from_value(item.clone())
                .map_err(|e| Error::field(format!("[{i}]"), e.to_string()))?;
            if letter.m() != m || letter.n() != n {
                return Err(Error::field(
                    format!("[{i}]"),
                    format!(
                        "letter acts on {}x{}, expected {m}x{n}",
                        letter.m(),
                        letter.n()
                    ),
                ));
            }
            Ok(letter)
        })
        .collect()
}

pub fn letters_to_json(letters: &[ExtremalLetter]) -> String {
    serde_json::to_string(letters).expect("letters always serialize")
}

/// Stable identifier of a letter list: SHA-256 of its compact JSON, truncated.
pub fn alphabet_id(letters: &[ExtremalLetter]) -> String {
    let digest = Sha256::digest(letters_to_json(letters).as_bytes());
    hex::encode(&digest[..8])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letter(s: &[usize], t: &[usize]) -> ExtremalLetter {
        ExtremalLetter::from_images(s, t).unwrap()
    }

    #[test]
    fn step_examples() {
        let s = ProductSubset::from_pairs(2, 2, &[(1, 1)]).unwrap();
        // (1,2);(1,2) is the transposition on both sides
        let a = letter(&[2, 1], &[2, 1]);
        let out = extremal_step(&s, &a).unwrap();
        assert_eq!(
            out,
            ProductSubset::from_pairs(2, 2, &[(2, 1), (1, 2)]).unwrap()
        );
        let id = letter(&[1, 2], &[1, 2]);
        assert_eq!(extremal_step(&s, &id).unwrap(), s);
        assert!(extremal_step(&s, &letter(&[1, 2, 3], &[1, 2])).is_err());
    }

    #[test]
    fn anchor_by_squared_transposition_pair() {
        // a: (1,3);(1,2) on a 3x2 grid, applied twice from {(1,1)}
        let a = ExtremalLetter::new(
            Transformation::transposition(3, 1, 3),
            Transformation::transposition(2, 1, 2),
        );
        let s0 = ProductSubset::from_pairs(3, 2, &[(1, 1)]).unwrap();
        let s2 = extremal_step(&extremal_step(&s0, &a).unwrap(), &a).unwrap();
        assert_eq!(
            s2,
            ProductSubset::from_pairs(3, 2, &[(1, 1), (3, 2)]).unwrap()
        );
    }

    #[test]
    fn codes_round_trip_in_lexicographic_order() {
        let all: Vec<_> = full_alphabet(2, 3).collect();
        assert_eq!(all.len(), 4 * 27);
        for (i, a) in all.iter().enumerate() {
            let (cs, ct) = a.codes();
            assert_eq!(cs as usize * 27 + ct as usize, i);
            assert_eq!(&ExtremalLetter::from_codes(2, 3, cs, ct), a);
        }
    }

    #[test]
    fn letter_list_parsing() {
        let text = r#"[{"s": [2,1], "t": [1,1]}, {"s": [1,1], "t": [2,2]}]"#;
        let letters = parse_letters(text, 2, 2).unwrap();
        assert_eq!(letters.len(), 2);
        assert_eq!(
            parse_letters(&letters_to_json(&letters), 2, 2).unwrap(),
            letters
        );
        assert!(parse_letters(text, 3, 2).is_err());
        let bad = r#"[{"s": [3,1], "t": [1,1]}]"#;
        assert!(parse_letters(bad, 2, 2)
            .unwrap_err()
            .to_string()
            .contains("[0]"));
        assert_eq!(alphabet_id(&letters).len(), 16);
    }
}
