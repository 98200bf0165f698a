use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use serde_json::{json, Value};
use ssc_core::automata::{dfa_to_value, parse_dfa, state_complexity, Dfa};
use ssc_core::disting::{
    brute_subsets_pairwise_distinct, ternary_witness, unique_in_subgraph, uniquely_distinguishable,
};
use ssc_core::reach::{
    alphabet_sufficiency, bfs_reach, certify, direct_smaller_check, greedy_alphabet,
    letters_to_json, parse_letters, prune_alphabet, verify_certificate, AlphabetSpec, Certificate,
    CheckpointOptions, ReachOptions, ReachReport,
};
use ssc_core::search::{
    count_right_dfas, max_shuffle_complexity, min_witness_alphabet, run_search, RightCountOptions,
    RightIsomorphism, SearchMode, SearchResult,
};
use ssc_core::shuffle::{
    bound_f, count_valid_subsets, ideal_bound, okhotin_witness, shuffle_state_complexity,
    ENUMERATION_GUARD,
};

use crate::{Cli, CliError, Command, IsomorphismArg, ModeArg, Output};

type CmdResult = Result<Output, CliError>;

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Bound { m, n } => cmd_bound(*m, *n),
        Command::Complexity { left, right } => cmd_complexity(left, right),
        Command::Reach {
            m,
            n,
            alphabet,
            checkpoint_dir,
            resume,
            stop_after,
            workers,
        } => {
            let checkpoint = checkpoint_dir.as_ref().map(|dir| CheckpointOptions {
                dir: dir.clone(),
                resume: *resume,
                stop_after: *stop_after,
            });
            cmd_reach(
                *m,
                *n,
                alphabet,
                ReachOptions {
                    workers: (*workers).max(1),
                    checkpoint,
                },
            )
        }
        Command::Certify {
            m,
            n,
            bases,
            output,
            workers,
        } => cmd_certify(*m, *n, bases, output.as_deref(), (*workers).max(1)),
        Command::Verify { certificate } => cmd_verify(certificate),
        Command::DirectSmaller { m, n } => cmd_direct_smaller(*m, *n),
        Command::Alphabet {
            m,
            n,
            letters,
            greedy,
            output,
        } => cmd_alphabet(*m, *n, letters.as_deref(), *greedy, output.as_deref()),
        Command::Distinguish { m, n, brute } => cmd_distinguish(*m, *n, *brute),
        Command::Search {
            m,
            n,
            k,
            mode,
            cap,
            witnesses,
            count_right,
            ignore_finals,
            isomorphism,
            workers,
        } => {
            let count = count_right.then_some(RightCountOptions {
                ignore_finals: *ignore_finals,
                isomorphism: match isomorphism {
                    IsomorphismArg::PerDfa => RightIsomorphism::PerDfa,
                    IsomorphismArg::Joint => RightIsomorphism::Joint,
                },
            });
            with_workers(*workers, || {
                cmd_search(*m, *n, *k, *mode, *cap, witnesses.as_deref(), count)
            })
        }
        Command::MinAlphabet {
            m,
            n,
            from,
            to,
            workers,
        } => with_workers(*workers, || cmd_min_alphabet(*m, *n, *from, *to)),
        Command::Okhotin { n } => cmd_okhotin(*n),
    }
}

fn with_workers<T: Send>(
    workers: usize,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Input(format!("cannot start {workers} workers: {e}")))?;
    pool.install(f)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::file(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::file(path, e))
}

fn load_dfa(path: &Path) -> Result<Dfa, CliError> {
    parse_dfa(&read(path)?).map_err(|e| CliError::file(path, e))
}

fn cmd_bound(m: usize, n: usize) -> CmdResult {
    let f = bound_f(m, n)?;
    let (a, b) = (m * n - 1, (m - 1) * (n - 1));
    let mersenne = |e: usize| (BigUint::from(1u8) << e) - 1u8;
    let (c, d) = (mersenne(m - 1), mersenne(n - 1));
    let mut text = format!("f({m},{n}) = {f}");
    let formula = format!("2^{a} + 2^{b}·{c}·{d}");
    if formula != f.to_string() {
        write!(text, "\n         = {formula}").unwrap();
    }
    let mut report = json!({"m": m, "n": n, "bound": f.to_string(), "formula": formula});
    if m * n <= ENUMERATION_GUARD {
        let counted = count_valid_subsets(m, n)?;
        if counted != f {
            return Err(CliError::Invariant(format!(
                "{counted} valid subsets counted, but f({m},{n}) = {f}"
            )));
        }
        write!(text, "\nvalid subsets counted: {counted}").unwrap();
        report["valid_subsets"] = json!(counted.to_string());
    }
    Ok(Output { text, json: report })
}

fn cmd_complexity(left: &Path, right: &Path) -> CmdResult {
    let k = load_dfa(left)?;
    let l = load_dfa(right)?;
    let (km, ln) = (state_complexity(&k), state_complexity(&l));
    let kappa = shuffle_state_complexity(&k, &l)?;
    let bound = bound_f(km, ln)?;
    let met = bound == kappa.into();
    let text = format!(
        "κ(K) = {km}\nκ(L) = {ln}\nκ(K ⧢ L) = {kappa}\nf({km},{ln}) = {bound}\nbound {}",
        if met { "met" } else { "not met" }
    );
    let report = json!({
        "left_complexity": km,
        "right_complexity": ln,
        "shuffle_complexity": kappa,
        "bound": bound.to_string(),
        "met": met,
    });
    Ok(Output { text, json: report })
}

fn reach_text(r: &ReachReport) -> String {
    let mut text = format!(
        "reach {}×{}: reached {} of {} (complete={}, fixpoint={}, generations={}, {:.2}s)",
        r.m, r.n, r.reached, r.bound, r.complete, r.fixpoint, r.generations, r.elapsed_seconds
    );
    if let Some(lineage) = &r.checkpoint_lineage {
        write!(text, "\ncheckpoint lineage: {lineage}").unwrap();
    }
    if !r.unreached_sample.is_empty() {
        write!(text, "\nunreached sample: {:?}", r.unreached_sample).unwrap();
    }
    text
}

fn cmd_reach(m: usize, n: usize, alphabet: &str, opts: ReachOptions) -> CmdResult {
    let spec = if alphabet == "full" {
        AlphabetSpec::Full
    } else {
        let path = Path::new(alphabet);
        AlphabetSpec::Letters(
            parse_letters(&read(path)?, m, n).map_err(|e| CliError::file(path, e))?,
        )
    };
    let report = bfs_reach(m, n, &spec, &opts)?;
    if report.reached > report.bound {
        return Err(CliError::Invariant(format!(
            "reached {} subsets, above the bound {}",
            report.reached, report.bound
        )));
    }
    Ok(Output {
        text: reach_text(&report),
        json: serde_json::to_value(&report).expect("reports serialize"),
    })
}

fn certificate_summary(cert: &Certificate) -> (String, Value) {
    let report = verify_certificate(cert);
    let gaps = cert.gaps();
    let rules = cert.rule_counts();
    let mut text = format!(
        "certificate {}×{}: {} grids, {} nodes, {} gaps; verification {}",
        cert.m,
        cert.n,
        report.grids,
        report.nodes,
        gaps.len(),
        if report.valid { "passed" } else { "FAILED" }
    );
    for (rule, count) in &rules {
        write!(text, "\n  {rule}: {count}").unwrap();
    }
    for failure in &report.failures {
        write!(
            text,
            "\n  failure at {}×{} {}: {}",
            failure.m, failure.n, failure.subset, failure.reason
        )
        .unwrap();
    }
    let rule_map: serde_json::Map<String, Value> =
        rules.iter().map(|(r, c)| (r.clone(), json!(c))).collect();
    let value = json!({
        "m": cert.m,
        "n": cert.n,
        "base_facts": cert.base_facts,
        "grids": report.grids,
        "nodes": report.nodes,
        "gaps": gaps,
        "rule_counts": rule_map,
        "verification": report,
    });
    (text, value)
}

fn cmd_certify(
    m: usize,
    n: usize,
    bases: &[(usize, usize)],
    output: Option<&Path>,
    workers: usize,
) -> CmdResult {
    // each base fact is established here rather than taken on trust
    for &(bm, bn) in bases {
        let r = bfs_reach(
            bm,
            bn,
            &AlphabetSpec::Full,
            &ReachOptions {
                workers,
                checkpoint: None,
            },
        )?;
        if !r.complete {
            return Err(CliError::Input(format!(
                "base fact {bm}x{bn} does not hold: reached {} of {}",
                r.reached, r.bound
            )));
        }
    }
    let cert = with_workers(workers, || Ok(certify(m, n, bases)?))?;
    if let Some(path) = output {
        write(
            path,
            &serde_json::to_string(&cert).expect("certificates serialize"),
        )?;
    }
    let (mut text, mut value) = certificate_summary(&cert);
    if let Some(path) = output {
        write!(text, "\nwritten to {}", path.display()).unwrap();
        value["output"] = json!(path.display().to_string());
    }
    if !value["verification"]["valid"].as_bool().unwrap_or(false) {
        return Err(CliError::Invariant(format!(
            "freshly built certificate fails verification:\n{text}"
        )));
    }
    Ok(Output { text, json: value })
}

fn cmd_verify(path: &Path) -> CmdResult {
    let cert: Certificate = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::file(path, ssc_core::Error::from(e)))?;
    let (text, value) = certificate_summary(&cert);
    if !value["verification"]["valid"].as_bool().unwrap_or(false) {
        return Err(CliError::Input(text));
    }
    Ok(Output { text, json: value })
}

fn cmd_direct_smaller(m: usize, n: usize) -> CmdResult {
    let r = direct_smaller_check(m, n)?;
    let mut text = format!(
        "direct-smaller {m}×{n}: {} of {} valid subsets of size >= 3 have a smaller direct predecessor",
        r.covered, r.checked
    );
    if !r.passed() {
        write!(
            text,
            "\n{} exceptions, e.g. {}",
            r.exception_count,
            r.exceptions.join(", ")
        )
        .unwrap();
    }
    Ok(Output {
        text,
        json: serde_json::to_value(&r).expect("reports serialize"),
    })
}

fn cmd_alphabet(
    m: usize,
    n: usize,
    letters: Option<&Path>,
    greedy: bool,
    output: Option<&Path>,
) -> CmdResult {
    match (letters, greedy) {
        (Some(path), _) => {
            let letters = parse_letters(&read(path)?, m, n).map_err(|e| CliError::file(path, e))?;
            let sufficient = alphabet_sufficiency(m, n, &letters)?;
            let text = format!(
                "{} letters: {}",
                letters.len(),
                if sufficient {
                    "every valid subset is reachable"
                } else {
                    "some valid subsets are unreachable"
                }
            );
            Ok(Output {
                text,
                json: json!({"m": m, "n": n, "letters": letters.len(), "sufficient": sufficient}),
            })
        }
        (None, true) => {
            let greedy = greedy_alphabet(m, n)?;
            let pruned = prune_alphabet(m, n, &greedy)?;
            let list = letters_to_json(&pruned);
            if let Some(path) = output {
                write(path, &list)?;
            }
            let text = format!(
                "greedy: {} letters, after pruning: {}\n{list}",
                greedy.len(),
                pruned.len()
            );
            let value = json!({
                "m": m,
                "n": n,
                "greedy_letters": greedy.len(),
                "pruned_letters": pruned.len(),
                "letters": serde_json::from_str::<Value>(&list).expect("letter lists are JSON"),
            });
            Ok(Output { text, json: value })
        }
        (None, false) => Err(CliError::Input("give --letters FILE or --greedy".into())),
    }
}

const LETTER_NAMES: [&str; 3] = ["a", "b", "c"];

fn cmd_distinguish(m: usize, n: usize, brute: bool) -> CmdResult {
    let (k, l) = ternary_witness(m, n)?;
    let shuffle = ssc_core::shuffle::build_shuffle_nfa(&k, &l)?;
    let nfa = shuffle.nfa();
    let edges = unique_in_subgraph(nfa);
    let closed = uniquely_distinguishable(nfa);
    let states = nfa.state_count();
    let all = closed.len() == states;
    let mut text = if all {
        format!(
            "all {states} states uniquely distinguishable; subgraph edges: {}",
            edges.len()
        )
    } else {
        format!(
            "{} of {states} states uniquely distinguishable; subgraph edges: {}",
            closed.len(),
            edges.len()
        )
    };
    let pair = |i: usize| shuffle.state_pair(i);
    let mut edge_values = Vec::new();
    for e in &edges {
        let (from, to) = (pair(e.from), pair(e.to));
        let letter = LETTER_NAMES[e.letter];
        write!(
            text,
            "\n({},{}) -{letter}-> ({},{})",
            from.0, from.1, to.0, to.1
        )
        .unwrap();
        edge_values.push(json!({"from": [from.0, from.1], "letter": letter, "to": [to.0, to.1]}));
    }
    let mut value = json!({
        "m": m,
        "n": n,
        "states": states,
        "uniquely_distinguishable": closed.len(),
        "all_distinguishable": all,
        "edge_count": edges.len(),
        "edges": edge_values,
    });
    if brute {
        let distinct = brute_subsets_pairwise_distinct(nfa)?;
        if all && !distinct {
            return Err(CliError::Invariant(
                "certified NFA has equivalent subsets".into(),
            ));
        }
        write!(
            text,
            "\nexhaustive check: all 2^{states} subsets pairwise {}",
            if distinct { "distinct" } else { "NOT distinct" }
        )
        .unwrap();
        value["brute_pairwise_distinct"] = json!(distinct);
    }
    Ok(Output { text, json: value })
}

fn pair_values(result: &SearchResult) -> Vec<Value> {
    result
        .witness_pairs()
        .iter()
        .map(|p| json!({"left": dfa_to_value(&p.left), "right": dfa_to_value(&p.right)}))
        .collect()
}

fn cmd_search(
    m: usize,
    n: usize,
    k: usize,
    mode: ModeArg,
    cap: usize,
    witnesses: Option<&Path>,
    count: Option<RightCountOptions>,
) -> CmdResult {
    // counting needs every witness, not just the listed ones
    let keep = if count.is_some() { usize::MAX } else { cap };
    let result = match mode {
        ModeArg::Auto => max_shuffle_complexity(m, n, k, keep)?,
        ModeArg::Exhaustive => run_search(m, n, k, SearchMode::Exhaustive, keep)?,
        ModeArg::Targeted => run_search(m, n, k, SearchMode::BoundTargeted, keep)?,
    };
    let right_count = count.map(|opts| {
        if result.met {
            count_right_dfas(&result.witnesses, opts)
        } else {
            0
        }
    });
    let mut listed = result.clone();
    listed.witnesses.truncate(cap);
    let pairs = pair_values(&listed);
    if let Some(path) = witnesses {
        write(
            path,
            &serde_json::to_string_pretty(&pairs).expect("JSON values always serialize"),
        )?;
    }
    let mode_name = match result.mode {
        SearchMode::Exhaustive => "exhaustive",
        SearchMode::BoundTargeted => "bound_targeted",
    };
    let mut summary = json!({
        "max": result.max,
        "bound": result.bound,
        "met": result.met,
        "candidates_evaluated": result.candidates_evaluated,
    });
    let mut text = summary.to_string();
    write!(
        text,
        "\n{m}×{n} over {k} letters ({mode_name}): {} multisets, {} witness pairs, {} structures",
        result.multisets, result.witness_count, result.structure_count
    )
    .unwrap();
    if let Some(c) = right_count {
        write!(
            text,
            "\nnon-isomorphic right DFAs in bound-meeting pairs: {c}"
        )
        .unwrap();
    }
    if witnesses.is_none() && !pairs.is_empty() {
        write!(
            text,
            "\n{}",
            serde_json::to_string_pretty(&pairs).expect("JSON values always serialize")
        )
        .unwrap();
    }
    summary["m"] = json!(m);
    summary["n"] = json!(n);
    summary["k"] = json!(k);
    summary["mode"] = json!(mode_name);
    summary["multisets"] = json!(result.multisets);
    summary["witness_count"] = json!(result.witness_count);
    summary["structure_count"] = json!(result.structure_count);
    if let Some(c) = right_count {
        summary["right_dfa_count"] = json!(c);
    }
    summary["witnesses"] = json!(pairs);
    Ok(Output {
        text,
        json: summary,
    })
}

fn cmd_min_alphabet(m: usize, n: usize, from: usize, to: usize) -> CmdResult {
    let k = min_witness_alphabet(m, n, from..=to)?;
    let text = match k {
        Some(k) => format!("smallest witness alphabet for {m}×{n} in {from}..={to}: {k}"),
        None => format!("no witness alphabet for {m}×{n} in {from}..={to}"),
    };
    Ok(Output {
        text,
        json: json!({"m": m, "n": n, "from": from, "to": to, "min_alphabet": k}),
    })
}

fn cmd_okhotin(n: usize) -> CmdResult {
    let l = okhotin_witness(n)?;
    let letters: Vec<&str> = l.alphabet().iter().map(String::as_str).collect();
    let sigma_star = Dfa::universal(&letters);
    let kappa = shuffle_state_complexity(&sigma_star, &l)?;
    let bound = ideal_bound(n)?;
    let tight = bound == kappa.into();
    let relation = if tight { "=" } else { "≠" };
    let text = format!("κ(Σ* ⧢ L) = {kappa} {relation} 2^{{{n}−2}}+1");
    Ok(Output {
        text,
        json: json!({"n": n, "complexity": kappa, "bound": bound.to_string(), "tight": tight}),
    })
}
