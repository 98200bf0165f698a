use num_bigint::BigUint;
use num_traits::One;

use crate::automata::{Dfa, Transformation};
use crate::error::{Error, Result};
use crate::shuffle::subset::{first_column_mask, low_bits};

/// Largest grid that brute-force enumeration will walk.
pub const ENUMERATION_GUARD: usize = 24;

fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}

/// Upper bound on `κ(K ⧢ L)` for `κ(K) = m`, `κ(L) = n`:
/// `2^{mn−1} + 2^{(m−1)(n−1)}·(2^{m−1}−1)·(2^{n−1}−1)`.
pub fn bound_f(m: usize, n: usize) -> Result<BigUint> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("bound_f needs m, n >= 1"));
    }
    let one = BigUint::one();
    Ok(pow2(m * n - 1) + pow2((m - 1) * (n - 1)) * (pow2(m - 1) - &one) * (pow2(n - 1) - &one))
}

/// `bound_f` as a machine integer, for grids small enough to enumerate.
pub fn bound_f_u64(m: usize, n: usize) -> Result<u64> {
    let f = bound_f(m, n)?;
    u64::try_from(&f).map_err(|_| Error::invalid(format!("bound_f({m},{n}) exceeds 64 bits")))
}

/// Counts subsets of `Q_m × Q_n` satisfying Condition (C) by walking all of them.
pub fn count_valid_subsets(m: usize, n: usize) -> Result<BigUint> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("grid dimensions must be positive"));
    }
    if m * n > ENUMERATION_GUARD {
        return Err(Error::guard(
            "grid cells m*n",
            ENUMERATION_GUARD as u128,
            (m * n) as u128,
        ));
    }
    let row1 = low_bits(n);
    let col1 = first_column_mask(m, n);
    let count = (0..1u64 << (m * n))
        .filter(|&s| s & row1 != 0 && s & col1 != 0)
        .count();
    Ok(BigUint::from(count))
}

/// Tight bound `2^{n−2}+1` on `κ(Σ* ⧢ L)` for `κ(L) = n ≥ 3`.
pub fn ideal_bound(n: usize) -> Result<BigUint> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "ideal_bound needs n >= 3 (n = {n}); smaller cases are covered by bound_f(1, n)"
        )));
    }
    Ok(pow2(n - 2) + BigUint::one())
}

/// Proven lower bound on the alphabet size of a pair meeting `bound_f(m, n)`.
///
/// The general argument gives `mn − 1`. For `m = n = 2` that would be 3,
/// but no pair over three letters meets the bound (the exhaustive witness
/// search confirms it), so that case is hard-coded to 4. The value is not
/// claimed to be tight in general.
pub fn min_alphabet_lower_bound(m: usize, n: usize) -> Result<usize> {
    if m < 2 || n < 2 {
        return Err(Error::invalid("min_alphabet_lower_bound needs m, n >= 2"));
    }
    Ok(if (m, n) == (2, 2) { 4 } else { m * n - 1 })
}

/// Minimal `n`-state DFA over `a1..a{n−2}` for `(a1 Σ* a1 ∪ … ∪ a{n−2} Σ* a{n−2}) Σ*`.
///
/// State 1 is initial, state `i+1` remembers that the first letter was `a_i`,
/// and state `n` is the accepting sink.
pub fn okhotin_witness(n: usize) -> Result<Dfa> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "okhotin_witness needs n >= 3 (n = {n})"
        )));
    }
    let k = n - 2;
    let alphabet = (1..=k).map(|i| format!("a{i}")).collect();
    let delta = (1..=k)
        .map(|i| {
            let mut images = vec![0; n];
            images[0] = i + 1;
            for j in 1..=k {
                images[j] = if j == i { n } else { j + 1 };
            }
            images[n - 1] = n;
            Transformation::new(&images)
        })
        .collect::<Result<Vec<_>>>()?;
    Dfa::new(alphabet, delta, 1, &[n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{state_complexity, Automaton};

    #[test]
    fn bound_values() {
        assert_eq!(bound_f(1, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(bound_f(2, 2).unwrap(), BigUint::from(10u32));
        assert_eq!(bound_f(2, 3).unwrap(), BigUint::from(44u32));
        for n in 1..10 {
            assert_eq!(bound_f(1, n).unwrap(), pow2(n - 1));
        }
        assert!(bound_f(0, 3).is_err());
        // large arguments stay exact
        assert_eq!(bound_f(10, 10).unwrap().bits(), 100);
    }

    #[test]
    fn enumeration_oracle() {
        assert_eq!(count_valid_subsets(2, 2).unwrap(), BigUint::from(10u32));
        assert_eq!(count_valid_subsets(3, 3).unwrap(), BigUint::from(400u32));
        assert_eq!(count_valid_subsets(2, 4).unwrap(), BigUint::from(184u32));
        assert!(count_valid_subsets(5, 5).is_err());
    }

    #[test]
    fn counting_identity_up_to_sixteen_cells() {
        for m in 1..=16 {
            for n in 1..=16 / m {
                assert_eq!(
                    count_valid_subsets(m, n).unwrap(),
                    bound_f(m, n).unwrap(),
                    "({m},{n})"
                );
            }
        }
    }

    #[test]
    fn ideal_and_alphabet_bounds() {
        assert_eq!(ideal_bound(3).unwrap(), BigUint::from(3u32));
        assert_eq!(ideal_bound(4).unwrap(), BigUint::from(5u32));
        assert!(ideal_bound(2).is_err());
        assert_eq!(min_alphabet_lower_bound(2, 2).unwrap(), 4);
        assert_eq!(min_alphabet_lower_bound(2, 3).unwrap(), 5);
        assert_eq!(min_alphabet_lower_bound(3, 3).unwrap(), 8);
        assert!(min_alphabet_lower_bound(1, 3).is_err());
    }

    #[test]
    fn okhotin_witness_shape() {
        let d3 = okhotin_witness(3).unwrap();
        assert_eq!(d3.alphabet(), ["a1".to_string()]);
        assert!(!d3.accepts(&[0]));
        assert!(d3.accepts(&[0, 0]));
        assert!(d3.accepts(&[0, 0, 0]));
        for n in 3..8 {
            assert_eq!(state_complexity(&okhotin_witness(n).unwrap()), n);
        }
        let d5 = okhotin_witness(5).unwrap();
        assert!(d5.accepts_word(&["a2", "a1", "a3", "a2"]).unwrap());
        assert!(!d5.accepts_word(&["a2", "a1", "a3"]).unwrap());
    }
}
