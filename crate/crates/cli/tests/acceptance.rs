//! End-to-end acceptance suite. Every test prints one line
//! `criterion N: PASS|FAIL …` and fails if any of its checks fail.
//!
//! The complete six-letter enumeration for two and three states is
//! `#[ignore]`d; run it with `cargo test -p ssc --test acceptance -- --ignored`.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use ssc_core::automata::{parse_dfa, Dfa, Transformation};
use ssc_core::disting::{
    brute_subsets_pairwise_distinct, subsets_pairwise_distinct, ternary_witness,
    uniquely_distinguishable,
};
use ssc_core::reach::{
    bfs_reach, certify, direct_smaller_check, extremal_step, reduce_permutation,
    verify_certificate, AlphabetSpec, CheckpointOptions, ReachOptions,
};
use ssc_core::search::{canonical_pair, max_shuffle_complexity, min_witness_alphabet};
use ssc_core::shuffle::{
    bound_f, bound_f_u64, build_shuffle_nfa, count_valid_subsets, okhotin_witness,
    shuffle_state_complexity, ProductSubset,
};

/// Collects the outcome of one criterion and reports it on a single line.
struct Criterion {
    number: u32,
    title: &'static str,
    failures: Vec<String>,
    started: Instant,
}

impl Criterion {
    fn new(number: u32, title: &'static str) -> Self {
        Criterion {
            number,
            title,
            failures: Vec::new(),
            started: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self) {
        let secs = self.started.elapsed().as_secs_f64();
        let (status, detail) = if self.failures.is_empty() {
            ("PASS", String::new())
        } else {
            ("FAIL", format!(": {}", self.failures.join("; ")))
        };
        let line = format!(
            "criterion {}: {status} {} ({secs:.1}s){detail}\n",
            self.number, self.title
        );
        // straight to the handle so the line shows even when output is captured
        let _ = std::io::stderr().lock().write_all(line.as_bytes());
        assert!(self.failures.is_empty(), "criterion {} failed", self.number);
    }
}

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn fixture(name: &str) -> Dfa {
    let path = fixture_path(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_dfa(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Deterministic RNG; override the seed with `SSC_TEST_SEED`.
fn rng() -> ChaCha8Rng {
    let seed = std::env::var("SSC_TEST_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x5EED_2024_u64);
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_dfa(rng: &mut impl Rng, n: usize, k: usize) -> Dfa {
    let names = (0..k)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let delta = (0..k)
        .map(|_| {
            Transformation::new(&(0..n).map(|_| rng.gen_range(1..=n)).collect::<Vec<_>>()).unwrap()
        })
        .collect();
    let finals: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.5)).collect();
    Dfa::new(names, delta, 1, &finals).unwrap()
}

/// Independent count of the subsets of an m×n grid meeting row 1 and
/// column 1 (bit (p−1)·n + (q−1) stands for the pair (p, q)).
fn brute_valid_count(m: usize, n: usize) -> u64 {
    let row1: u64 = (1 << n) - 1;
    let col1: u64 = (0..m).map(|p| 1u64 << (p * n)).sum();
    (0..1u64 << (m * n))
        .filter(|s| s & row1 != 0 && s & col1 != 0)
        .count() as u64
}

/// Closed form of the bound, evaluated independently of the library.
fn closed_form(m: usize, n: usize) -> BigUint {
    let two = |e: usize| BigUint::from(1u8) << e;
    two(m * n - 1) + two((m - 1) * (n - 1)) * (two(m - 1) - 1u8) * (two(n - 1) - 1u8)
}

fn full_reach(m: usize, n: usize, workers: usize) -> ssc_core::reach::ReachReport {
    bfs_reach(
        m,
        n,
        &AlphabetSpec::Full,
        &ReachOptions {
            workers,
            checkpoint: None,
        },
    )
    .unwrap()
}

const DESK_GRIDS: [(usize, usize); 5] = [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4)];

#[test]
fn criterion_01_bound_values() {
    let mut c = Criterion::new(1, "bound values and valid-subset counts");
    for ((m, n), want) in [((1, 1), 1u32), ((1, 2), 2), ((2, 2), 10), ((2, 3), 44)] {
        let got = bound_f(m, n).unwrap();
        c.check(got == BigUint::from(want), || {
            format!("f({m},{n}) = {got}, want {want}")
        });
    }
    for m in 1..=16 {
        for n in 1..=16 / m {
            let counted = count_valid_subsets(m, n).unwrap();
            let bound = bound_f(m, n).unwrap();
            let oracle = BigUint::from(brute_valid_count(m, n));
            c.check(
                counted == bound && bound == oracle && bound == closed_form(m, n),
                || format!("({m},{n}): counted {counted}, bound {bound}, oracle {oracle}"),
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_02_witness_fixtures() {
    let mut c = Criterion::new(2, "shipped witness pairs reach 10 and 44");
    for (k, l, want) in [
        ("fig1_k.json", "fig1_l.json", 10),
        ("ex1b_k.json", "ex1b_l.json", 44),
    ] {
        let got = shuffle_state_complexity(&fixture(k), &fixture(l)).unwrap();
        c.check(got == want, || format!("{k} ⧢ {l}: {got}, want {want}"));
    }
    c.finish();
}

#[test]
fn criterion_03_all_sided_ideals() {
    let mut c = Criterion::new(3, "κ(Σ* ⧢ L) = 2^(n−2) + 1 for n = 3..6");
    for n in 3..=6 {
        let l = okhotin_witness(n).unwrap();
        let names: Vec<&str> = l.alphabet().iter().map(String::as_str).collect();
        let got = shuffle_state_complexity(&Dfa::universal(&names), &l).unwrap() as u64;
        let want = (1u64 << (n - 2)) + 1;
        c.check(got == want, || format!("n = {n}: {got}, want {want}"));
    }
    c.finish();
}

#[test]
fn criterion_04_full_reachability() {
    let mut c = Criterion::new(4, "full-alphabet BFS reaches every valid subset");
    for (m, n) in DESK_GRIDS {
        let r = full_reach(m, n, 1);
        let want = brute_valid_count(m, n);
        c.check(r.complete && r.reached == want, || {
            format!("({m},{n}): reached {} of {want}", r.reached)
        });
    }
    let workers = std::thread::available_parallelism().map_or(1, |p| p.get());
    let r = full_reach(4, 4, workers);
    let want = brute_valid_count(4, 4);
    c.check(r.complete && r.reached == want, || {
        format!("(4,4): reached {} of {want}", r.reached)
    });
    c.finish();
}

#[test]
fn criterion_05_certificates() {
    let mut c = Criterion::new(5, "certificates for every grid up to 4×8 verify");
    let bases: Vec<(usize, usize)> = DESK_GRIDS
        .into_iter()
        .filter(|&(m, n)| full_reach(m, n, 1).complete)
        .collect();
    c.check(bases.len() == DESK_GRIDS.len(), || {
        format!("only {bases:?} established")
    });
    let cert = certify(4, 8, &bases).unwrap();
    let gaps = cert.gaps();
    c.check(gaps.is_empty(), || format!("{} gaps", gaps.len()));
    let report = verify_certificate(&cert);
    c.check(report.valid, || {
        format!("verification failed: {:?}", report.failures)
    });
    c.check(report.grids == 32, || format!("{} grids", report.grids));
    c.finish();
}

#[test]
fn criterion_06_permutation_reductions() {
    let mut c = Criterion::new(6, "permutation reductions replay");
    let text = std::fs::read_to_string(fixture_path("permutation_tables.json")).unwrap();
    let cases: Vec<Value> = serde_json::from_str(&text).unwrap();
    c.check(cases.len() == 3, || format!("{} cases", cases.len()));
    for case in &cases {
        let name = case["name"].as_str().unwrap_or("?").to_string();
        let m = case["m"].as_u64().unwrap() as usize;
        let phi: Vec<usize> = serde_json::from_value(case["phi"].clone()).unwrap();
        let columns: Vec<Vec<usize>> = serde_json::from_value(case["columns"].clone()).unwrap();
        let s = ProductSubset::from_columns(m, &columns).unwrap();
        let perm = Transformation::new(&phi).unwrap();
        match reduce_permutation(&s, &perm) {
            None => c.check(false, || format!("{name}: no reduction")),
            Some(r) => {
                c.check(r.smaller.is_valid() && r.smaller.len() < s.len(), || {
                    format!("{name}: not smaller")
                });
                c.check(r.letter.s == perm, || {
                    format!("{name}: different permutation")
                });
                let replay = extremal_step(&r.smaller, &r.letter).unwrap();
                c.check(replay == s, || format!("{name}: replays to {replay}"));
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_07_direct_smaller() {
    let mut c = Criterion::new(
        7,
        "every valid subset of size ≥ 3 has a smaller direct predecessor",
    );
    for (m, n) in [(2, 2), (3, 3)] {
        let r = direct_smaller_check(m, n).unwrap();
        c.check(r.passed() && r.exceptions.is_empty(), || {
            format!("({m},{n}): {:?}", r.exceptions)
        });
    }
    c.finish();
}

#[test]
fn criterion_08_distinguishability() {
    let mut c = Criterion::new(8, "ternary witnesses: all subsets pairwise distinguishable");
    for m in 2..=6 {
        for n in 2..=6 {
            let (k, l) = ternary_witness(m, n).unwrap();
            let nfa = build_shuffle_nfa(&k, &l).unwrap();
            let unique = uniquely_distinguishable(nfa.nfa()).len();
            c.check(unique == m * n, || {
                format!("({m},{n}): {unique} of {} uniquely distinguishable", m * n)
            });
            c.check(subsets_pairwise_distinct(nfa.nfa()), || {
                format!("({m},{n}): closure incomplete")
            });
            if m * n <= 9 {
                let brute = brute_subsets_pairwise_distinct(nfa.nfa()).unwrap();
                c.check(brute, || {
                    format!("({m},{n}): brute force finds equivalent subsets")
                });
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_09_witness_search() {
    let mut c = Criterion::new(9, "witness search on two-state pairs");
    let three = max_shuffle_complexity(2, 2, 3, 0).unwrap();
    c.check(three.max < 10, || {
        format!("three letters reach {}", three.max)
    });

    let four = max_shuffle_complexity(2, 2, 4, usize::MAX).unwrap();
    c.check(four.max == 10, || {
        format!("four letters reach {}", four.max)
    });
    let drawn = canonical_pair(&fixture("fig1_k.json"), &fixture("fig1_l.json")).unwrap();
    c.check(four.structure_count == 1, || {
        format!("{} transition structures", four.structure_count)
    });
    c.check(
        four.witnesses
            .iter()
            .all(|w| w.structure() == drawn.structure()),
        || "structure differs".into(),
    );
    c.check(four.witnesses.contains(&drawn), || {
        "shipped pair not found".into()
    });
    for pair in four.witness_pairs() {
        let kappa = shuffle_state_complexity(&pair.left, &pair.right).unwrap();
        c.check(kappa == 10, || {
            format!("listed witness has complexity {kappa}")
        });
    }

    let min = min_witness_alphabet(2, 3, 1..=6).unwrap();
    c.check(min == Some(6), || {
        format!("smallest alphabet for (2,3): {min:?}")
    });
    c.finish();
}

#[test]
#[ignore = "about a minute and a half on one core"]
fn criterion_09_two_by_three_enumeration() {
    let mut c = Criterion::new(9, "complete six-letter enumeration for (2,3)");
    let r = max_shuffle_complexity(2, 3, 6, usize::MAX).unwrap();
    c.check(r.max == 44 && r.met, || format!("maximum {}", r.max));
    let shipped = canonical_pair(&fixture("ex1b_k.json"), &fixture("ex1b_l.json")).unwrap();
    c.check(r.witnesses.contains(&shipped), || {
        "shipped pair not found".into()
    });
    c.check(r.witness_count > 0, || "no witnesses listed".into());
    let _ = writeln!(
        std::io::stderr().lock(),
        "  witness pairs: {}, structures: {}",
        r.witness_count,
        r.structure_count
    );
    c.finish();
}

#[test]
fn criterion_10_properties() {
    let mut c = Criterion::new(
        10,
        "random-pair invariants, worker determinism, checkpoint resume",
    );
    let mut rng = rng();
    for trial in 0..120 {
        let (m, n, k) = (
            rng.gen_range(1..=4),
            rng.gen_range(1..=4),
            rng.gen_range(1..=3),
        );
        let a = random_dfa(&mut rng, m, k);
        let b = random_dfa(&mut rng, n, k);
        let nfa = build_shuffle_nfa(&a, &b).unwrap();
        let (dfa, subsets) = nfa.subset_automaton().unwrap();
        for (i, s) in subsets.iter().enumerate() {
            let pairs = s.pairs();
            let meets = pairs.iter().any(|&(p, _)| p == 1) && pairs.iter().any(|&(_, q)| q == 1);
            c.check(meets, || {
                format!("trial {trial}: reachable {s} misses row or column 1")
            });
            let (rows, cols) = s.projections();
            for x in 0..k {
                let (rows2, cols2) = subsets[dfa.step_index(i, x)].projections();
                let grows = rows.iter().all(|r| rows2.contains(r))
                    && cols.iter().all(|q| cols2.contains(q));
                c.check(grows, || {
                    format!("trial {trial}: projection of {s} shrinks")
                });
            }
        }
    }

    for (m, n) in [(3, 3), (3, 4)] {
        let one = full_reach(m, n, 1);
        let many = full_reach(m, n, 4);
        c.check(one == many, || {
            format!("({m},{n}): reports differ between 1 and 4 workers")
        });
        c.check(one.reached == bound_f_u64(m, n).unwrap(), || {
            format!("({m},{n}): incomplete")
        });
    }

    let straight_dir = tempfile::tempdir().unwrap();
    let resumed_dir = tempfile::tempdir().unwrap();
    let opts = |dir: &std::path::Path, resume: bool, stop_after: Option<u64>| ReachOptions {
        workers: 2,
        checkpoint: Some(CheckpointOptions {
            dir: dir.to_path_buf(),
            resume,
            stop_after,
        }),
    };
    let straight = bfs_reach(
        3,
        3,
        &AlphabetSpec::Full,
        &opts(straight_dir.path(), false, None),
    )
    .unwrap();
    let partial = bfs_reach(
        3,
        3,
        &AlphabetSpec::Full,
        &opts(resumed_dir.path(), false, Some(2)),
    )
    .unwrap();
    c.check(
        !partial.fixpoint && partial.reached < straight.reached,
        || "interrupted run already finished".into(),
    );
    let resumed = bfs_reach(
        3,
        3,
        &AlphabetSpec::Full,
        &opts(resumed_dir.path(), true, None),
    )
    .unwrap();
    c.check(resumed == straight, || {
        "resumed run differs from the uninterrupted one".into()
    });
    c.finish();
}
