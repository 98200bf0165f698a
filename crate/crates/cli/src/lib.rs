//! The `ssc` command line: argument parsing, report rendering and exit codes.
//!
//! Every command produces an [`Output`] holding a text rendering and a JSON
//! object with the same numbers; `--json` selects the latter. Exit codes are
//! 0 on success, 1 for bad input and 2 when an internal invariant fails.

mod commands;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

pub use commands::run;

#[derive(Debug, Parser)]
#[command(
    name = "ssc",
    version,
    about = "Experiments on the state complexity of shuffle"
)]
pub struct Cli {
    /// Emit a single JSON object instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Bound-targeted space first, the full space if the bound is not met.
    Auto,
    Exhaustive,
    Targeted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IsomorphismArg {
    PerDfa,
    Joint,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The upper bound f(m,n), evaluated exactly.
    Bound { m: usize, n: usize },

    /// State complexity of the shuffle of two DFAs given as JSON files.
    Complexity { left: PathBuf, right: PathBuf },

    /// Breadth-first reachability in the extremal subset automaton.
    Reach {
        m: usize,
        n: usize,
        /// `full`, or a JSON file with a list of letters {"s": [..], "t": [..]}.
        #[arg(long, default_value = "full")]
        alphabet: String,
        /// Directory for per-generation checkpoints.
        #[arg(long)]
        checkpoint_dir: Option<PathBuf>,
        /// Continue from the latest checkpoint in --checkpoint-dir.
        #[arg(long, requires = "checkpoint_dir")]
        resume: bool,
        /// Stop after this many generations (the run can be resumed).
        #[arg(long, requires = "checkpoint_dir")]
        stop_after: Option<u64>,
        /// Worker threads.
        #[arg(long, env = "SSC_THREADS", default_value_t = 1)]
        workers: usize,
    },

    /// Build and check a reachability certificate for all grids up to m×n.
    Certify {
        m: usize,
        n: usize,
        /// Grid `MxN` whose full reachability is established by BFS and then
        /// used as a base fact; repeatable.
        #[arg(long = "base", value_parser = parse_grid)]
        bases: Vec<(usize, usize)>,
        /// Write the certificate JSON here.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, env = "SSC_THREADS", default_value_t = 1)]
        workers: usize,
    },

    /// Replay a certificate file.
    Verify { certificate: PathBuf },

    /// Check that every valid subset of size at least 3 has a direct
    /// predecessor among smaller valid subsets.
    DirectSmaller { m: usize, n: usize },

    /// Check a letter list for sufficiency, or build one greedily.
    Alphabet {
        m: usize,
        n: usize,
        /// Letter list to check.
        #[arg(long, conflicts_with = "greedy")]
        letters: Option<PathBuf>,
        /// Build a sufficient list greedily, then drop redundant letters.
        #[arg(long)]
        greedy: bool,
        /// Write the greedy letter list here.
        #[arg(long, requires = "greedy")]
        output: Option<PathBuf>,
    },

    /// Unique in-transitions and distinguishability for the ternary witness.
    Distinguish {
        m: usize,
        n: usize,
        /// Also compare all subsets exhaustively (at most 12 states).
        #[arg(long)]
        brute: bool,
    },

    /// Exhaustive witness search over DFA pairs with k letters.
    Search {
        m: usize,
        n: usize,
        k: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        /// Witnesses listed in the report.
        #[arg(long, default_value_t = 10)]
        cap: usize,
        /// Write the listed witnesses as a JSON array of DFA pairs.
        #[arg(long)]
        witnesses: Option<PathBuf>,
        /// Also count the non-isomorphic right DFAs of bound-meeting pairs.
        #[arg(long)]
        count_right: bool,
        /// Identify right DFAs that differ only in final states.
        #[arg(long, requires = "count_right")]
        ignore_finals: bool,
        #[arg(long, value_enum, default_value_t = IsomorphismArg::PerDfa, requires = "count_right")]
        isomorphism: IsomorphismArg,
        #[arg(long, env = "SSC_THREADS", default_value_t = 1)]
        workers: usize,
    },

    /// Smallest alphabet size in a range for which a pair meets the bound.
    MinAlphabet {
        m: usize,
        n: usize,
        #[arg(long, default_value_t = 1)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, env = "SSC_THREADS", default_value_t = 1)]
        workers: usize,
    },

    /// κ(Σ* ⧢ L) for the all-sided ideal witness with n states.
    Okhotin { n: usize },
}

fn parse_grid(text: &str) -> Result<(usize, usize), String> {
    let (m, n) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected MxN, found {text:?}"))?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}"));
    Ok((parse(m)?, parse(n)?))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ssc_core::Error),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: ssc_core::Error,
    },

    #[error("{0}")]
    Input(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn file(path: &std::path::Path, source: impl Into<ssc_core::Error>) -> Self {
        CliError::File {
            path: path.to_path_buf(),
            source: source.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 2,
            CliError::Core(e) | CliError::File { source: e, .. } if e.is_internal() => 2,
            _ => 1,
        }
    }
}

/// The result of one command in both renderings.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub json: Value,
}

impl Output {
    pub fn render(&self, json: bool) -> String {
        if json {
            serde_json::to_string_pretty(&self.json).expect("JSON values always serialize")
        } else {
            self.text.clone()
        }
    }
}
