//! Generation checkpoints for the reachability search.
//!
//! A checkpoint file holds one JSON header line, the raw visited bitmap
//! (bit `e` of the subset space is bit `e % 8` of byte `e / 8`), a newline,
//! and then the frontier encodings in decimal, one per line. Files are named
//! `gen-%06d.ckpt`; a `LATEST` file names the newest one.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const LATEST: &str = "LATEST";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub m: usize,
    pub n: usize,
    pub alphabet_id: String,
    pub generation: u64,
    pub visited_count: u64,
    pub frontier_len: u64,
    pub bitmap_sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    /// Visited bitmap as little-endian 64-bit words.
    pub visited: Vec<u64>,
    pub frontier: Vec<u64>,
}

pub fn bitmap_bytes(words: &[u64], nbits: u64) -> Vec<u8> {
    let nbytes = nbits.div_ceil(8) as usize;
    words
        .iter()
        .flat_map(|w| w.to_le_bytes())
        .take(nbytes)
        .collect()
}

pub fn file_name(generation: u64) -> String {
    format!("gen-{generation:06}.ckpt")
}

impl Checkpoint {
    pub fn new(
        m: usize,
        n: usize,
        alphabet_id: &str,
        generation: u64,
        visited: Vec<u64>,
        frontier: Vec<u64>,
    ) -> Self {
        let bytes = bitmap_bytes(&visited, 1u64 << (m * n));
        let header = CheckpointHeader {
            m,
            n,
            alphabet_id: alphabet_id.to_string(),
            generation,
            visited_count: visited.iter().map(|w| w.count_ones() as u64).sum(),
            frontier_len: frontier.len() as u64,
            bitmap_sha256: hex::encode(Sha256::digest(&bytes)),
        };
        Self {
            header,
            visited,
            frontier,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = serde_json::to_vec(h).expect("header serializes");
        out.push(b'\n');
        out.extend(bitmap_bytes(&self.visited, 1u64 << (h.m * h.n)));
        out.push(b'\n');
        for s in &self.frontier {
            out.extend(s.to_string().as_bytes());
            out.push(b'\n');
        }
        out
    }

    /// Parses and integrity-checks a checkpoint.
    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::Checkpoint(msg.to_string());
        let nl = data
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| bad("missing header line"))?;
        let header: CheckpointHeader = serde_json::from_slice(&data[..nl])
            .map_err(|e| Error::Checkpoint(format!("header: {e}")))?;
        if header.m == 0 || header.n == 0 || header.m * header.n > 30 {
            return Err(bad("header grid dimensions out of range"));
        }
        let nbits = 1u64 << (header.m * header.n);
        let nbytes = nbits.div_ceil(8) as usize;
        let body = &data[nl + 1..];
        if body.len() < nbytes + 1 || body[nbytes] != b'\n' {
            return Err(bad("truncated bitmap"));
        }
        let bitmap = &body[..nbytes];
        if hex::encode(Sha256::digest(bitmap)) != header.bitmap_sha256 {
            return Err(bad("bitmap hash does not match header"));
        }
        let mut visited = vec![0u64; nbits.div_ceil(64) as usize];
        for (i, &b) in bitmap.iter().enumerate() {
            visited[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        let count: u64 = visited.iter().map(|w| w.count_ones() as u64).sum();
        if count != header.visited_count {
            return Err(bad("visited count does not match bitmap"));
        }
        let text =
            std::str::from_utf8(&body[nbytes + 1..]).map_err(|_| bad("frontier is not UTF-8"))?;
        let frontier = text
            .lines()
            .map(|l| {
                l.trim()
                    .parse::<u64>()
                    .map_err(|_| bad("malformed frontier entry"))
            })
            .collect::<Result<Vec<_>>>()?;
        if frontier.len() as u64 != header.frontier_len {
            return Err(bad("frontier length does not match header"));
        }
        if frontier
            .iter()
            .any(|&s| s >= nbits || visited[(s / 64) as usize] >> (s % 64) & 1 == 0)
        {
            return Err(bad("frontier entry outside the visited set"));
        }
        Ok(Self {
            header,
            visited,
            frontier,
        })
    }

    /// Writes the checkpoint into `dir` and repoints `LATEST` at it.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let name = file_name(self.header.generation);
        let path = dir.join(&name);
        let tmp = dir.join(format!("{name}.tmp"));
        fs::File::create(&tmp)?.write_all(&self.to_bytes())?;
        fs::rename(&tmp, &path)?;
        let latest_tmp = dir.join(format!("{LATEST}.tmp"));
        fs::write(&latest_tmp, format!("{name}\n"))?;
        fs::rename(&latest_tmp, dir.join(LATEST))?;
        Ok(path)
    }

    /// Loads the checkpoint named by `LATEST` in `dir`.
    pub fn load_latest(dir: &Path) -> Result<Self> {
        let pointer = dir.join(LATEST);
        let name = fs::read_to_string(&pointer)
            .map_err(|e| Error::Checkpoint(format!("cannot read {}: {e}", pointer.display())))?;
        let name = name.trim();
        if name.contains('/') || name.contains('\\') || name.is_empty() {
            return Err(Error::Checkpoint(format!("bad LATEST entry {name:?}")));
        }
        let data = fs::read(dir.join(name))
            .map_err(|e| Error::Checkpoint(format!("cannot read {name}: {e}")))?;
        Self::from_bytes(&data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        let mut visited = vec![0u64; 8];
        for s in [1u64, 3, 5, 130, 511] {
            visited[(s / 64) as usize] |= 1 << (s % 64);
        }
        Checkpoint::new(3, 3, "full", 2, visited, vec![130, 511])
    }

    #[test]
    fn round_trip() {
        let c = sample();
        assert_eq!(c.header.visited_count, 5);
        assert_eq!(Checkpoint::from_bytes(&c.to_bytes()).unwrap(), c);
    }

    #[test]
    fn bitmap_byte_order_matches_encoding() {
        let c = sample();
        let bytes = c.to_bytes();
        let start = bytes.iter().position(|&b| b == b'\n').unwrap() + 1;
        // subset 3 is bit 3 of byte 0, subset 130 is bit 2 of byte 16
        assert_eq!(bytes[start] & 0b1000, 0b1000);
        assert_eq!(bytes[start + 16], 0b100);
    }

    #[test]
    fn corruption_is_detected() {
        let c = sample();
        let mut bytes = c.to_bytes();
        let start = bytes.iter().position(|&b| b == b'\n').unwrap() + 1;
        bytes[start + 1] ^= 1;
        assert!(matches!(
            Checkpoint::from_bytes(&bytes),
            Err(Error::Checkpoint(_))
        ));
        let truncated = &c.to_bytes()[..start + 10];
        assert!(Checkpoint::from_bytes(truncated).is_err());
    }

    #[test]
    fn write_and_load_latest() {
        let dir = tempfile::tempdir().unwrap();
        let c = sample();
        let path = c.write(dir.path()).unwrap();
        assert!(path.ends_with("gen-000002.ckpt"));
        assert_eq!(Checkpoint::load_latest(dir.path()).unwrap(), c);
        assert!(Checkpoint::load_latest(&dir.path().join("missing")).is_err());
    }
}
