use crate::automata::transformation::all_permutations;
use crate::automata::Dfa;

/// Largest alphabet for which [`canonicalize`] minimizes over letter orders.
pub const MAX_CANONICAL_LETTERS: usize = 8;

/// Ordering key identifying a DFA up to isomorphism.
///
/// The key is `[state count, finals as 0/1 flags..., delta table by letter...]`
/// after breadth-first relabeling from the initial state. When
/// `letter_renaming` is set the key is the lexicographic minimum over all
/// orders of the alphabet; otherwise letters keep their given positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub letter_renaming: bool,
    pub key: Vec<u32>,
}

/// Breadth-first key of `d` with letters taken in the order `letters`.
/// `d` must be trim, so that the traversal visits every state.
fn bfs_key(d: &Dfa, letters: &[usize]) -> Vec<u32> {
    let n = d.state_count();
    let mut id = vec![u32::MAX; n];
    let mut order = Vec::with_capacity(n);
    id[d.initial_index()] = 0;
    order.push(d.initial_index());
    let mut head = 0;
    while head < order.len() {
        let q = order[head];
        head += 1;
        for &a in letters {
            let r = d.step_index(q, a);
            if id[r] == u32::MAX {
                id[r] = order.len() as u32;
                order.push(r);
            }
        }
    }
    let mut key = Vec::with_capacity(1 + n + n * letters.len());
    key.push(n as u32);
    key.extend(order.iter().map(|&q| d.is_final_index(q) as u32));
    for &a in letters {
        key.extend(order.iter().map(|&q| id[d.step_index(q, a)]));
    }
    key
}

/// Canonical form of the accessible part of `d`.
///
/// Alphabets of at most [`MAX_CANONICAL_LETTERS`] letters are canonical up to
/// state relabeling and letter renaming. Larger alphabets get the
/// state-relabeling-only form; use [`isomorphic`] to compare those.
pub fn canonicalize(d: &Dfa) -> CanonicalForm {
    let t = d.trim();
    let k = t.letter_count();
    if k > MAX_CANONICAL_LETTERS {
        let letters: Vec<usize> = (0..k).collect();
        return CanonicalForm {
            letter_renaming: false,
            key: bfs_key(&t, &letters),
        };
    }
    let key = all_permutations(k)
        .map(|p| {
            let letters: Vec<usize> = p.indices().iter().map(|&i| i as usize).collect();
            bfs_key(&t, &letters)
        })
        .min()
        .expect("at least one letter order");
    CanonicalForm {
        letter_renaming: true,
        key,
    }
}

/// Canonical form with letters kept in place (state relabeling only).
pub fn canonicalize_fixed_letters(d: &Dfa) -> CanonicalForm {
    let t = d.trim();
    let letters: Vec<usize> = (0..t.letter_count()).collect();
    CanonicalForm {
        letter_renaming: false,
        key: bfs_key(&t, &letters),
    }
}

/// Isomorphism up to state relabeling and letter renaming, for any alphabet size.
pub fn isomorphic(a: &Dfa, b: &Dfa) -> bool {
    if a.letter_count() != b.letter_count() {
        return false;
    }
    if a.letter_count() <= MAX_CANONICAL_LETTERS {
        return canonicalize(a) == canonicalize(b);
    }
    let (a, b) = (a.trim(), b.trim());
    if a.state_count() != b.state_count() || a.finals().len() != b.finals().len() {
        return false;
    }
    let mut matcher = LetterMatcher::new(&a, &b);
    matcher.search(0)
}

/// Backtracking search for a letter bijection that extends to a state
/// isomorphism. Assigning a letter pair propagates the state map along every
/// assigned letter, so inconsistent branches die early.
struct LetterMatcher<'a> {
    a: &'a Dfa,
    b: &'a Dfa,
    letter_map: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl<'a> LetterMatcher<'a> {
    fn new(a: &'a Dfa, b: &'a Dfa) -> Self {
        let k = a.letter_count();
        Self {
            a,
            b,
            letter_map: vec![None; k],
            used: vec![false; k],
        }
    }

    /// Closure of the state map from the initial pair under assigned letters.
    fn consistent(&self) -> bool {
        let n = self.a.state_count();
        let mut fwd = vec![usize::MAX; n];
        let mut bwd = vec![usize::MAX; n];
        let (ia, ib) = (self.a.initial_index(), self.b.initial_index());
        fwd[ia] = ib;
        bwd[ib] = ia;
        let mut stack = vec![ia];
        while let Some(p) = stack.pop() {
            let q = fwd[p];
            if self.a.is_final_index(p) != self.b.is_final_index(q) {
                return false;
            }
            for (x, y) in self.letter_map.iter().enumerate() {
                let Some(y) = *y else { continue };
                let (p2, q2) = (self.a.step_index(p, x), self.b.step_index(q, y));
                match (fwd[p2], bwd[q2]) {
                    (usize::MAX, usize::MAX) => {
                        fwd[p2] = q2;
                        bwd[q2] = p2;
                        stack.push(p2);
                    }
                    (f, g) if f == q2 && g == p2 => {}
                    _ => return false,
                }
            }
        }
        true
    }

    fn search(&mut self, x: usize) -> bool {
        if x == self.letter_map.len() {
            return true;
        }
        for y in 0..self.used.len() {
            if self.used[y] {
                continue;
            }
            self.letter_map[x] = Some(y);
            self.used[y] = true;
            if self.consistent() && self.search(x + 1) {
                return true;
            }
            self.used[y] = false;
            self.letter_map[x] = None;
        }
        false
    }
}
