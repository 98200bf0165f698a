#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssc_core::automata::{parse_dfa, Dfa, Transformation};

pub fn fixture(name: &str) -> Dfa {
    let path = fixture_path(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_dfa(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// Deterministic RNG; override the seed with `SSC_TEST_SEED`.
pub fn rng() -> ChaCha8Rng {
    let seed = std::env::var("SSC_TEST_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x5EED_2024_u64);
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn letters(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect()
}

pub fn random_dfa(rng: &mut impl Rng, n: usize, k: usize) -> Dfa {
    let delta = (0..k)
        .map(|_| {
            Transformation::new(&(0..n).map(|_| rng.gen_range(1..=n)).collect::<Vec<_>>()).unwrap()
        })
        .collect();
    let finals: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.5)).collect();
    Dfa::new(letters(k), delta, 1, &finals).unwrap()
}
