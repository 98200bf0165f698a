use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A total map on the state set `{1..n}`.
///
/// Externally the map is written as its image list `[1t, 2t, ..., nt]` with
/// 1-based state ids. Internally images are stored 0-based; the `*_index`
/// accessors expose that representation for hot loops.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transformation {
    images: Vec<u32>,
}

impl Transformation {
    /// Builds a transformation from 1-based images.
    pub fn new(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::invalid(
                "transformation must act on at least one state",
            ));
        }
        let mut out = Vec::with_capacity(n);
        for (q, &img) in images.iter().enumerate() {
            if img == 0 || img > n {
                return Err(Error::invalid(format!(
                    "image of state {} is {img}, outside 1..={n}",
                    q + 1
                )));
            }
            out.push((img - 1) as u32);
        }
        Ok(Self { images: out })
    }

    /// Builds a transformation from 0-based images. Panics on out-of-range images.
    pub fn from_indices(images: Vec<u32>) -> Self {
        let n = images.len() as u32;
        assert!(n > 0, "empty transformation");
        assert!(images.iter().all(|&i| i < n), "image out of range");
        Self { images }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n as u32).collect(),
        }
    }

    /// `(p -> q)`: maps `p` to `q`, fixes every other state.
    pub fn map_to(n: usize, p: usize, q: usize) -> Self {
        let mut t = Self::identity(n);
        t.images[p - 1] = (q - 1) as u32;
        t
    }

    /// `(p, q)`: transposes `p` and `q`.
    pub fn transposition(n: usize, p: usize, q: usize) -> Self {
        let mut t = Self::identity(n);
        t.images.swap(p - 1, q - 1);
        t
    }

    /// Maps every state to `c`.
    pub fn constant(n: usize, c: usize) -> Self {
        Self {
            images: vec![(c - 1) as u32; n],
        }
    }

    /// `i -> i+1` for `i < n`, `n -> 1`.
    pub fn cycle(n: usize) -> Self {
        Self {
            images: (0..n as u32).map(|i| (i + 1) % n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of the 1-based state `q`. Panics if `q` is out of range.
    pub fn apply(&self, q: usize) -> usize {
        assert!(
            q >= 1 && q <= self.len(),
            "state {q} outside 1..={}",
            self.len()
        );
        self.images[q - 1] as usize + 1
    }

    /// Image of the 0-based state index `q`.
    #[inline]
    pub fn apply_index(&self, q: usize) -> usize {
        self.images[q] as usize
    }

    pub fn indices(&self) -> &[u32] {
        &self.images
    }

    /// 1-based image list.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize + 1).collect()
    }

    /// Right action composition: `q.then(other)` is `(q self) other`.
    pub fn then(&self, other: &Transformation) -> Transformation {
        assert_eq!(
            self.len(),
            other.len(),
            "composing transformations of different degree"
        );
        Self {
            images: self
                .images
                .iter()
                .map(|&i| other.images[i as usize])
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(q, &i)| q as u32 == i)
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.len()];
        for &i in &self.images {
            if std::mem::replace(&mut seen[i as usize], true) {
                return false;
            }
        }
        true
    }

    /// Inverse of a permutation; `None` when not a permutation.
    pub fn inverse(&self) -> Option<Transformation> {
        if !self.is_permutation() {
            return None;
        }
        let mut inv = vec![0u32; self.len()];
        for (q, &i) in self.images.iter().enumerate() {
            inv[i as usize] = q as u32;
        }
        Some(Self { images: inv })
    }

    /// Image of a set of states given as a bitmask over 0-based indices.
    pub fn image_of_mask(&self, mask: u64) -> u64 {
        let mut out = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1 << self.images[q];
        }
        out
    }

    /// Preimage of a set of states given as a bitmask over 0-based indices.
    pub fn preimage_of_mask(&self, mask: u64) -> u64 {
        let mut out = 0u64;
        for (q, &i) in self.images.iter().enumerate() {
            if mask >> i & 1 == 1 {
                out |= 1 << q;
            }
        }
        out
    }
}

impl fmt::Debug for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, i) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "]")
    }
}

impl Serialize for Transformation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.images().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Transformation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(deserializer)?;
        Transformation::new(&images).map_err(serde::de::Error::custom)
    }
}

/// Iterates all `n^n` transformations of `{1..n}` in lexicographic order of
/// their image lists.
#[derive(Clone, Debug)]
pub struct AllTransformations {
    current: Option<Vec<u32>>,
}

impl AllTransformations {
    pub fn new(n: usize) -> Self {
        Self {
            current: if n == 0 { None } else { Some(vec![0; n]) },
        }
    }
}

impl Iterator for AllTransformations {
    type Item = Transformation;

    fn next(&mut self) -> Option<Transformation> {
        let cur = self.current.as_mut()?;
        let out = Transformation {
            images: cur.clone(),
        };
        let n = cur.len() as u32;
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < n {
                break;
            }
            cur[pos] = 0;
        }
        Some(out)
    }
}

/// Iterates the `n!` permutations of `{1..n}` in lexicographic order.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Transformation> {
    let mut current: Option<Vec<u32>> = Some((0..n as u32).collect());
    std::iter::from_fn(move || {
        let cur = current.as_mut()?;
        let out = Transformation {
            images: cur.clone(),
        };
        // next lexicographic permutation
        let mut i = cur.len();
        loop {
            if i < 2 {
                current = None;
                break;
            }
            i -= 1;
            if cur[i - 1] < cur[i] {
                let mut j = cur.len() - 1;
                while cur[j] <= cur[i - 1] {
                    j -= 1;
                }
                cur.swap(i - 1, j);
                cur[i..].reverse();
                break;
            }
        }
        Some(out)
    })
}

/// Number of transformations of an `n`-element set, `n^n`.
pub fn monoid_size(n: usize) -> u128 {
    (n as u128).pow(n as u32)
}
