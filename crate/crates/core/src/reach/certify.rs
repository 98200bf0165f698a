//! Reachability certificates.
//!
//! A certificate lists, for every grid `m'×n'` with `m' ≤ m` and `n' ≤ n`,
//! every valid subset up to a permutation of the columns other than
//! column 1, each with a justification: the initial subset, an edge of a
//! breadth-first tree of a fully explored grid, or one of the reductions
//! (empty line, containment, isolated element, row permutation). The
//! verifier trusts nothing: it replays every justification, checks that the
//! dependency graph is acyclic, and checks that the listed representatives
//! cover every valid subset (their orbit sizes add up to `f(m', n')`).
//!
//! Column permutations fixing column 1 are automorphisms of `D_{m,n}`
//! (conjugating a letter by one gives another letter, and `{(1,1)}` is
//! fixed), so reachability of one orbit member gives the whole orbit.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automata::{all_permutations, Transformation};
use crate::error::{Error, Result};
use crate::reach::bfs::ReachTree;
use crate::reach::letter::{decode, encode, step_bits, ExtremalLetter};
use crate::reach::reduce::{
    anchor_scheme, columns, containment_bits, containment_letter, delete_line, empty_line,
    from_columns, lift_skipping, permutation_bits, single_element_bits, Axis,
};
use crate::shuffle::{bound_f_u64, is_valid_bits, row_of, ProductSubset};

/// Largest number of rows a certificate handles (row permutations are
/// enumerated exhaustively).
pub const CERTIFY_MAX_ROWS: usize = 5;
/// Largest number of columns (column permutations are packed 3 bits each).
pub const CERTIFY_MAX_COLUMNS: usize = 8;
/// Largest number of representatives in a single grid.
pub const CERTIFY_NODE_GUARD: u128 = 8_000_000;
/// Number of failures listed in a verification report.
pub const FAILURE_SAMPLE: usize = 32;

/// A subset of the grid `m×n`, given as a canonical representative and the
/// column permutation `sigma` that carries it to the subset meant.
///
/// `sigma` packs 3 bits per column: representative column `j` (0-based)
/// becomes column `(sigma >> 3j) & 7`. Column 0 is always fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeRef {
    pub m: u8,
    pub n: u8,
    pub rep: u64,
    pub sigma: u32,
}

impl NodeRef {
    fn of(bits: u64, m: usize, n: usize) -> Self {
        let (rep, sigma) = canonical(bits, m, n);
        Self {
            m: m as u8,
            n: n as u8,
            rep,
            sigma,
        }
    }

    fn grid(&self) -> (usize, usize) {
        (self.m as usize, self.n as usize)
    }

    /// The subset this reference denotes, if `sigma` is a permutation of
    /// the columns fixing column 1.
    fn resolve(&self) -> Option<u64> {
        let (m, n) = self.grid();
        let sigma = unpack_sigma(self.sigma, n)?;
        Some(apply_sigma(self.rep, m, n, &sigma))
    }
}

/// Letter codes `(s, t)` in the base-`m` / base-`n` numbering of
/// [`ExtremalLetter::codes`](crate::reach::ExtremalLetter::codes).
pub type LetterCodes = [u32; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Justification {
    /// `{(1,1)}` itself.
    Initial,
    /// A breadth-first tree edge `from · letter = S`.
    Bfs { from: NodeRef, letter: LetterCodes },
    /// A row or column contained in another: `from · letter = S`.
    Containment { from: NodeRef, letter: LetterCodes },
    /// Column classes closed under a row permutation: `from · letter = S`.
    Permutation { from: NodeRef, letter: LetterCodes },
    /// Deleting the empty row/column `index` (0-based, never 0) gives `to`.
    Shrink {
        axis: Axis,
        index: usize,
        to: NodeRef,
    },
    /// `(p, q)` (0-based) is alone in its row and column; removing its row
    /// and column gives `to` on the grid `(m−1)×(n−1)`.
    SingleElement { p: usize, q: usize, to: NodeRef },
}

impl Justification {
    fn dependency(&self) -> Option<&NodeRef> {
        match self {
            Justification::Initial => None,
            Justification::Bfs { from, .. }
            | Justification::Containment { from, .. }
            | Justification::Permutation { from, .. } => Some(from),
            Justification::Shrink { to, .. } | Justification::SingleElement { to, .. } => Some(to),
        }
    }

    pub fn rule(&self) -> &'static str {
        match self {
            Justification::Initial => "initial",
            Justification::Bfs { .. } => "bfs",
            Justification::Containment { .. } => "containment",
            Justification::Permutation { .. } => "permutation",
            Justification::Shrink { .. } => "shrink",
            Justification::SingleElement { .. } => "single_element",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateNode {
    pub rep: u64,
    /// `None` marks a gap: no rule applied.
    pub justification: Option<Justification>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCertificate {
    pub m: usize,
    pub n: usize,
    /// Sorted by `rep`.
    pub nodes: Vec<CertificateNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub m: usize,
    pub n: usize,
    /// Grids whose breadth-first trees were used for `bfs` justifications.
    pub base_facts: Vec<(usize, usize)>,
    /// Every grid `m'×n'` with `m' ≤ m`, `n' ≤ n`, in lexicographic order.
    pub grids: Vec<GridCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateGap {
    pub m: usize,
    pub n: usize,
    pub subset: String,
}

impl Certificate {
    pub fn node_count(&self) -> usize {
        self.grids.iter().map(|g| g.nodes.len()).sum()
    }

    /// Representatives that no rule justified.
    pub fn gaps(&self) -> Vec<CertificateGap> {
        self.grids
            .iter()
            .flat_map(|g| {
                g.nodes
                    .iter()
                    .filter(|node| node.justification.is_none())
                    .map(|node| CertificateGap {
                        m: g.m,
                        n: g.n,
                        subset: ProductSubset::raw(g.m, g.n, node.rep).to_string(),
                    })
            })
            .collect()
    }

    /// Number of representatives justified by each rule.
    pub fn rule_counts(&self) -> Vec<(String, usize)> {
        let mut counts: Vec<(String, usize)> = Vec::new();
        for node in self.grids.iter().flat_map(|g| &g.nodes) {
            let rule = node
                .justification
                .as_ref()
                .map_or("gap", Justification::rule);
            match counts.iter_mut().find(|(r, _)| r == rule) {
                Some((_, c)) => *c += 1,
                None => counts.push((rule.to_string(), 1)),
            }
        }
        counts
    }

    fn grid(&self, m: usize, n: usize) -> Option<&GridCertificate> {
        self.grids.iter().find(|g| g.m == m && g.n == n)
    }
}

/// Canonical representative under permutations of columns `2..n`: those
/// columns sorted by mask. Returns the representative and the packed
/// permutation carrying it back to `bits`.
pub(crate) fn canonical(bits: u64, m: usize, n: usize) -> (u64, u32) {
    let cols = columns(bits, m, n);
    let mut order: Vec<usize> = (1..n).collect();
    order.sort_by_key(|&j| (cols[j], j));
    let mut rep_cols = Vec::with_capacity(n);
    rep_cols.push(cols[0]);
    let mut sigma = 0u32;
    for (i, &j) in order.iter().enumerate() {
        rep_cols.push(cols[j]);
        sigma |= (j as u32) << (3 * (i + 1));
    }
    (from_columns(&rep_cols, m), sigma)
}

fn unpack_sigma(sigma: u32, n: usize) -> Option<Vec<usize>> {
    if n > CERTIFY_MAX_COLUMNS || sigma >> (3 * n) != 0 {
        return None;
    }
    let perm: Vec<usize> = (0..n).map(|j| (sigma >> (3 * j) & 7) as usize).collect();
    let mut seen = vec![false; n];
    for &x in &perm {
        if x >= n || std::mem::replace(&mut seen[x], true) {
            return None;
        }
    }
    (perm[0] == 0).then_some(perm)
}

fn apply_sigma(rep: u64, m: usize, n: usize, sigma: &[usize]) -> u64 {
    let cols = columns(rep, m, n);
    let mut out = vec![0u64; n];
    for (j, &c) in cols.iter().enumerate() {
        out[sigma[j]] = c;
    }
    from_columns(&out, m)
}

/// Size of the orbit of a representative: `(n−1)!` over the factorials of
/// the multiplicities among columns `2..n`.
fn orbit_size(rep: u64, m: usize, n: usize) -> u64 {
    let cols = columns(rep, m, n);
    let factorial = |k: usize| (1..=k as u64).product::<u64>();
    let mut size = factorial(n - 1);
    let mut i = 1;
    while i < n {
        let run = cols[i..].iter().take_while(|&&c| c == cols[i]).count();
        size /= factorial(run);
        i += run;
    }
    size
}

/// All canonical valid representatives of the grid, sorted.
fn representatives(m: usize, n: usize) -> Vec<u64> {
    let values = 1u64 << m;
    let mut out = Vec::new();
    let mut rest = vec![0u64; n - 1];
    for c0 in 1..values {
        loop {
            let has_row1 = c0 & 1 == 1 || rest.iter().any(|c| c & 1 == 1);
            if has_row1 {
                let mut cols = Vec::with_capacity(n);
                cols.push(c0);
                cols.extend_from_slice(&rest);
                out.push(from_columns(&cols, m));
            }
            // next nondecreasing tuple
            let Some(i) = (0..rest.len()).rev().find(|&i| rest[i] + 1 < values) else {
                break;
            };
            let v = rest[i] + 1;
            for slot in &mut rest[i..] {
                *slot = v;
            }
        }
        rest.iter_mut().for_each(|c| *c = 0);
    }
    out.sort_unstable();
    out
}

/// Upper estimate of the number of representatives of the grid.
fn representative_estimate(m: usize, n: usize) -> u128 {
    let values = 1u128 << m;
    let k = (n - 1) as u128;
    // C(values + k − 1, k) multisets for columns 2..n, times column 1
    let mut multisets = 1u128;
    for i in 0..k {
        multisets = multisets * (values + i) / (i + 1);
    }
    multisets * (values - 1)
}

/// Embeds a subset of `m'×n'` into the top-left corner of a grid with
/// `n0` columns.
fn embed(bits: u64, n: usize, rows: usize, n0: usize) -> u64 {
    (0..rows).fold(0, |acc, p| acc | row_of(bits, n, p) << (p * n0))
}

/// Inverse of [`embed`]; `None` if the subset leaves the corner.
fn unembed(bits: u64, m: usize, n: usize, n0: usize) -> Option<u64> {
    let mut out = 0u64;
    let mut rest = bits;
    for p in 0..m {
        let row = row_of(bits, n0, p);
        if row >> n != 0 {
            return None;
        }
        out |= row << (p * n);
        rest &= !(row << (p * n0));
    }
    (rest == 0).then_some(out)
}

/// Restricts a letter of a larger grid to the first `k` states: images
/// leaving them are replaced by the identity. Sound for subsets whose
/// image stays inside the corner, since then no occupied line leaves it.
fn restrict(code: u32, big: usize, k: usize) -> u32 {
    let images = decode(big, code);
    let restricted: Vec<u32> = (0..k)
        .map(|x| images.indices()[x])
        .enumerate()
        .map(|(x, y)| if (y as usize) < k { y } else { x as u32 })
        .collect();
    encode(&restricted)
}

struct Base {
    m0: usize,
    n0: usize,
    tree: ReachTree,
}

impl Base {
    fn covers(&self, m: usize, n: usize) -> bool {
        m <= self.m0 && n <= self.n0
    }

    fn justify(&self, bits: u64, m: usize, n: usize) -> Result<Option<Justification>> {
        let big = embed(bits, n, m, self.n0);
        let Some((parent, s, t)) = self.tree.parent(big) else {
            return Ok(None);
        };
        let small = unembed(parent, m, n, self.n0).ok_or_else(|| {
            Error::Invariant(format!(
                "breadth-first parent of {bits} leaves the {m}x{n} corner"
            ))
        })?;
        let letter = [restrict(s, self.m0, m), restrict(t, self.n0, n)];
        Ok(Some(Justification::Bfs {
            from: NodeRef::of(small, m, n),
            letter,
        }))
    }
}

fn check_grid(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("grid dimensions must be positive"));
    }
    if m > CERTIFY_MAX_ROWS {
        return Err(Error::guard(
            "certificate rows m",
            CERTIFY_MAX_ROWS as u128,
            m as u128,
        ));
    }
    if n > CERTIFY_MAX_COLUMNS {
        return Err(Error::guard(
            "certificate columns n",
            CERTIFY_MAX_COLUMNS as u128,
            n as u128,
        ));
    }
    let estimate = representative_estimate(m, n);
    if estimate > CERTIFY_NODE_GUARD {
        return Err(Error::guard(
            "certificate representatives per grid",
            CERTIFY_NODE_GUARD,
            estimate,
        ));
    }
    Ok(())
}

/// Builds a certificate for every grid up to `m×n`.
///
/// `base_facts` name grids whose full-alphabet exploration is complete;
/// their breadth-first trees (and those of their transposes) are rebuilt
/// here and justify every subset of every grid they contain. Other subsets
/// are justified by the reductions. Subsets no rule handles are left as
/// gaps, which the verifier rejects.
pub fn certify(m: usize, n: usize, base_facts: &[(usize, usize)]) -> Result<Certificate> {
    check_grid(m, n)?;
    let mut bases: Vec<Base> = Vec::new();
    for &(m0, n0) in base_facts {
        for (a, b) in [(m0, n0), (n0, m0)] {
            if !bases.iter().any(|x| x.m0 == a && x.n0 == b) {
                bases.push(Base {
                    m0: a,
                    n0: b,
                    tree: ReachTree::build(a, b)?,
                });
            }
        }
    }
    bases.sort_by_key(|b| (b.m0 * b.n0, b.m0));
    let permutations: Vec<Vec<u32>> = (1..=m)
        .map(|k| {
            all_permutations(k)
                .flat_map(|p| p.indices().to_vec())
                .collect()
        })
        .collect();

    let mut grids = Vec::new();
    for mm in 1..=m {
        for nn in 1..=n {
            let base = bases.iter().find(|b| b.covers(mm, nn));
            let phis = &permutations[mm - 1];
            let reps = representatives(mm, nn);
            let nodes = reps
                .par_iter()
                .map(|&rep| {
                    let justification = match base {
                        _ if rep == 1 => Some(Justification::Initial),
                        Some(base) => match base.justify(rep, mm, nn)? {
                            Some(j) => Some(j),
                            None => reduce(rep, mm, nn, phis),
                        },
                        None => reduce(rep, mm, nn, phis),
                    };
                    Ok(CertificateNode { rep, justification })
                })
                .collect::<Result<Vec<_>>>()?;
            grids.push(GridCertificate {
                m: mm,
                n: nn,
                nodes,
            });
        }
    }
    Ok(Certificate {
        m,
        n,
        base_facts: base_facts.to_vec(),
        grids,
    })
}

/// The first applicable reduction: empty line, containment, isolated
/// element, then row permutations in lexicographic order.
fn reduce(bits: u64, m: usize, n: usize, phis: &[u32]) -> Option<Justification> {
    if let Some((axis, index)) = empty_line(bits, m, n) {
        let smaller = delete_line(bits, m, n, axis, index);
        let (m2, n2) = match axis {
            Axis::Row => (m - 1, n),
            Axis::Column => (m, n - 1),
        };
        return Some(Justification::Shrink {
            axis,
            index,
            to: NodeRef::of(smaller, m2, n2),
        });
    }
    if let Some((smaller, axis, from, to)) = containment_bits(bits, m, n) {
        let (s, t) = containment_letter(m, n, axis, from, to).codes();
        return Some(Justification::Containment {
            from: NodeRef::of(smaller, m, n),
            letter: [s, t],
        });
    }
    if let Some((smaller, p, q)) = single_element_bits(bits, m, n) {
        return Some(Justification::SingleElement {
            p,
            q,
            to: NodeRef::of(smaller, m - 1, n - 1),
        });
    }
    for phi in phis.chunks(m) {
        if let Some((smaller, psi, _)) = permutation_bits(bits, m, n, phi) {
            let letter = [encode(phi), encode(&psi)];
            return Some(Justification::Permutation {
                from: NodeRef::of(smaller, m, n),
                letter,
            });
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyFailure {
    pub m: usize,
    pub n: usize,
    pub subset: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub m: usize,
    pub n: usize,
    pub grids: usize,
    pub nodes: usize,
    pub failure_count: usize,
    /// The first failures found, at most [`FAILURE_SAMPLE`].
    pub failures: Vec<VerifyFailure>,
}

struct Failures {
    count: usize,
    sample: Vec<VerifyFailure>,
}

impl Failures {
    fn push(&mut self, m: usize, n: usize, bits: u64, reason: impl Into<String>) {
        self.count += 1;
        if self.sample.len() < FAILURE_SAMPLE {
            let subset = if m * n <= 64 {
                ProductSubset::raw(m, n, bits).to_string()
            } else {
                bits.to_string()
            };
            self.sample.push(VerifyFailure {
                m,
                n,
                subset,
                reason: reason.into(),
            });
        }
    }
}

/// Replays a certificate: every justification, acyclicity of the
/// dependencies, and coverage of every valid subset of every grid.
pub fn verify_certificate(cert: &Certificate) -> VerifyReport {
    let mut failures = Failures {
        count: 0,
        sample: Vec::new(),
    };
    let mut offsets: HashMap<(usize, usize), usize> = HashMap::new();
    let mut total = 0usize;
    for g in &cert.grids {
        if offsets.insert((g.m, g.n), total).is_some() {
            failures.push(g.m, g.n, 0, "grid listed twice");
        }
        total += g.nodes.len();
    }
    if cert.m == 0 || cert.n == 0 || cert.m > CERTIFY_MAX_ROWS || cert.n > CERTIFY_MAX_COLUMNS {
        failures.push(cert.m, cert.n, 0, "certificate grid out of range");
    }
    for mm in 1..=cert.m.min(CERTIFY_MAX_ROWS) {
        for nn in 1..=cert.n.min(CERTIFY_MAX_COLUMNS) {
            if !offsets.contains_key(&(mm, nn)) {
                failures.push(mm, nn, 0, "grid missing from certificate");
            }
        }
    }

    // Coverage: sorted canonical valid representatives whose orbits add up
    // to the number of valid subsets.
    for g in &cert.grids {
        let (m, n) = (g.m, g.n);
        if m == 0 || n == 0 || m > CERTIFY_MAX_ROWS || n > CERTIFY_MAX_COLUMNS {
            failures.push(m, n, 0, "grid out of range");
            continue;
        }
        let mut covered = 0u64;
        for (i, node) in g.nodes.iter().enumerate() {
            if node.rep >> (m * n) != 0 || !is_valid_bits(node.rep, m, n) {
                failures.push(m, n, node.rep, "representative is not a valid subset");
                continue;
            }
            if canonical(node.rep, m, n).0 != node.rep {
                failures.push(m, n, node.rep, "representative is not canonical");
                continue;
            }
            if i > 0 && g.nodes[i - 1].rep >= node.rep {
                failures.push(m, n, node.rep, "representatives are not strictly sorted");
                continue;
            }
            covered += orbit_size(node.rep, m, n);
        }
        match bound_f_u64(m, n) {
            Ok(f) if f == covered => {}
            Ok(f) => failures.push(
                m,
                n,
                0,
                format!("representatives cover {covered} valid subsets, expected {f}"),
            ),
            Err(e) => failures.push(m, n, 0, e.to_string()),
        }
    }

    // Replay every justification and record its dependency.
    let locate = |r: &NodeRef| -> Option<usize> {
        let (m, n) = r.grid();
        let g = cert.grid(m, n)?;
        let i = g.nodes.binary_search_by_key(&r.rep, |x| x.rep).ok()?;
        Some(offsets[&(m, n)] + i)
    };
    let mut deps: Vec<Option<usize>> = vec![None; total];
    for g in &cert.grids {
        let (m, n) = (g.m, g.n);
        if m == 0 || n == 0 || m > CERTIFY_MAX_ROWS || n > CERTIFY_MAX_COLUMNS {
            continue;
        }
        let offset = offsets[&(m, n)];
        for (i, node) in g.nodes.iter().enumerate() {
            let Some(j) = &node.justification else {
                failures.push(m, n, node.rep, "no justification");
                continue;
            };
            if let Some(dep) = j.dependency() {
                match locate(dep) {
                    Some(k) => deps[offset + i] = Some(k),
                    None => {
                        failures.push(
                            m,
                            n,
                            node.rep,
                            format!("{} refers to a subset not in the certificate", j.rule()),
                        );
                        continue;
                    }
                }
            }
            if let Err(reason) = replay(node.rep, m, n, j) {
                failures.push(m, n, node.rep, reason);
            }
        }
    }

    // Acyclicity of the dependency forest (each node has at most one
    // dependency, so following the chain suffices).
    let mut state = vec![0u8; total]; // 0 unvisited, 1 on the current chain, 2 done
    for start in 0..total {
        let mut chain = Vec::new();
        let mut cur = Some(start);
        while let Some(k) = cur {
            match state[k] {
                2 => break,
                1 => {
                    let (m, n, rep) = node_at(cert, &offsets, k);
                    failures.push(m, n, rep, "justifications form a cycle");
                    break;
                }
                _ => {
                    state[k] = 1;
                    chain.push(k);
                    cur = deps[k];
                }
            }
        }
        for k in chain {
            state[k] = 2;
        }
    }

    VerifyReport {
        valid: failures.count == 0,
        m: cert.m,
        n: cert.n,
        grids: cert.grids.len(),
        nodes: total,
        failure_count: failures.count,
        failures: failures.sample,
    }
}

fn node_at(
    cert: &Certificate,
    offsets: &HashMap<(usize, usize), usize>,
    k: usize,
) -> (usize, usize, u64) {
    for g in &cert.grids {
        let off = offsets[&(g.m, g.n)];
        if (off..off + g.nodes.len()).contains(&k) {
            return (g.m, g.n, g.nodes[k - off].rep);
        }
    }
    unreachable!("node index within the certificate")
}

fn decode_letter(letter: &LetterCodes, m: usize, n: usize) -> Option<(Vec<u32>, Vec<u32>)> {
    let (ms, ns) = (
        (m as u32).checked_pow(m as u32)?,
        (n as u32).checked_pow(n as u32)?,
    );
    (letter[0] < ms && letter[1] < ns).then(|| {
        (
            decode(m, letter[0]).indices().to_vec(),
            decode(n, letter[1]).indices().to_vec(),
        )
    })
}

fn replay(bits: u64, m: usize, n: usize, j: &Justification) -> std::result::Result<(), String> {
    let target_subset = |r: &NodeRef, expect: (usize, usize)| -> std::result::Result<u64, String> {
        if r.grid() != expect {
            return Err(format!(
                "refers to grid {}x{}, expected {}x{}",
                r.m, r.n, expect.0, expect.1
            ));
        }
        let t = r.resolve().ok_or("malformed column permutation")?;
        if !is_valid_bits(t, expect.0, expect.1) {
            return Err("refers to an invalid subset".to_string());
        }
        Ok(t)
    };
    match j {
        Justification::Initial => (bits == 1)
            .then_some(())
            .ok_or_else(|| "only {(1,1)} is initial".to_string()),
        Justification::Bfs { from, letter }
        | Justification::Containment { from, letter }
        | Justification::Permutation { from, letter } => {
            let t = target_subset(from, (m, n))?;
            let (s, tt) = decode_letter(letter, m, n).ok_or("letter code out of range")?;
            if step_bits(t, m, n, &s, &tt) != bits {
                return Err(format!("{} step does not replay", j.rule()));
            }
            Ok(())
        }
        Justification::Shrink { axis, index, to } => {
            let (limit, expect) = match axis {
                Axis::Row => (m, (m.wrapping_sub(1), n)),
                Axis::Column => (n, (m, n.wrapping_sub(1))),
            };
            if *index == 0 || *index >= limit {
                return Err("shrink index out of range".to_string());
            }
            let line = match axis {
                Axis::Row => row_of(bits, n, *index),
                Axis::Column => columns(bits, m, n)[*index],
            };
            if line != 0 {
                return Err("shrunk line is not empty".to_string());
            }
            let t = target_subset(to, expect)?;
            if delete_line(bits, m, n, *axis, *index) != t {
                return Err("shrink target does not match".to_string());
            }
            Ok(())
        }
        Justification::SingleElement { p, q, to } => {
            if m < 2 || n < 2 || *p >= m || *q >= n {
                return Err("isolated element out of range".to_string());
            }
            let t = target_subset(to, (m - 1, n - 1))?;
            if lift_skipping(t, m, n, *p, *q) | 1 << (p * n + q) != bits {
                return Err("single-element target does not match".to_string());
            }
            Ok(())
        }
    }
}

/// Longest justification chain followed when expanding a word; sound
/// chains shrink the subset or the grid at almost every step.
const MAX_CHAIN: usize = 10_000;

/// A raw letter: row and column images, 0-based.
type RawLetter = (Vec<u32>, Vec<u32>);

/// Expands the justification chain of `subset` into a word of `D_{m,n}`
/// that reaches it from `{(1,1)}`. Fails if the certificate does not
/// justify the subset.
pub fn certificate_word(cert: &Certificate, subset: &ProductSubset) -> Result<Vec<ExtremalLetter>> {
    let (m, n) = (subset.m(), subset.n());
    if !subset.is_valid() {
        return Err(Error::invalid(format!("{subset} is not a valid subset")));
    }
    let word = word_for(cert, NodeRef::of(subset.bits(), m, n), MAX_CHAIN)?;
    Ok(word
        .into_iter()
        .map(|(s, t)| {
            ExtremalLetter::new(
                Transformation::from_indices(s),
                Transformation::from_indices(t),
            )
        })
        .collect())
}

fn word_for(cert: &Certificate, r: NodeRef, fuel: usize) -> Result<Vec<RawLetter>> {
    let missing = || {
        Error::invalid(format!(
            "subset {} of grid {}x{} is not justified",
            r.rep, r.m, r.n
        ))
    };
    if fuel == 0 {
        return Err(Error::invalid("justification chain too long (cycle?)"));
    }
    let (m, n) = r.grid();
    let sigma = unpack_sigma(r.sigma, n).ok_or_else(missing)?;
    let grid = cert.grid(m, n).ok_or_else(missing)?;
    let i = grid
        .nodes
        .binary_search_by_key(&r.rep, |x| x.rep)
        .map_err(|_| missing())?;
    let j = grid.nodes[i].justification.as_ref().ok_or_else(missing)?;
    let mut word = match j {
        Justification::Initial => Vec::new(),
        Justification::Bfs { from, letter }
        | Justification::Containment { from, letter }
        | Justification::Permutation { from, letter } => {
            let mut w = word_for(cert, *from, fuel - 1)?;
            w.push(decode_letter(letter, m, n).ok_or_else(missing)?);
            w
        }
        Justification::Shrink { axis, index, to } => {
            let inner = word_for(cert, *to, fuel - 1)?;
            inner
                .into_iter()
                .map(|(s, t)| match axis {
                    Axis::Row => (skip_lift(&s, *index), t),
                    Axis::Column => (s, skip_lift(&t, *index)),
                })
                .collect()
        }
        Justification::SingleElement { p, q, to } => {
            let scheme = anchor_scheme(m, n, p + 1, q + 1);
            let prefix = (
                scheme.letter.s.indices().to_vec(),
                scheme.letter.t.indices().to_vec(),
            );
            let mut w = vec![prefix; scheme.repeat];
            let inner = word_for(cert, *to, fuel - 1)?;
            w.extend(
                inner
                    .into_iter()
                    .map(|(s, t)| (skip_lift(&s, *p), skip_lift(&t, *q))),
            );
            w
        }
    };
    // carry the representative's word over to the subset meant
    let mut inverse = vec![0u32; n];
    for (j, &x) in sigma.iter().enumerate() {
        inverse[x] = j as u32;
    }
    for (_, t) in &mut word {
        *t = (0..n)
            .map(|x| sigma[t[inverse[x] as usize] as usize] as u32)
            .collect();
    }
    Ok(word)
}

/// Lifts a transformation of `k` states to `k+1` states by inserting a
/// fixed state at `index`.
fn skip_lift(images: &[u32], index: usize) -> Vec<u32> {
    let up = |x: u32| if (x as usize) < index { x } else { x + 1 };
    let mut out = Vec::with_capacity(images.len() + 1);
    out.extend(images[..index].iter().map(|&y| up(y)));
    out.push(index as u32);
    out.extend(images[index..].iter().map(|&y| up(y)));
    out
}
