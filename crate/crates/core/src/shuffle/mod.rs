//! The shuffle product NFA, Condition (C), the upper bound `f(m,n)` and
//! end-to-end shuffle state complexity.

mod bounds;
mod product;
mod subset;

pub use bounds::{
    bound_f, bound_f_u64, count_valid_subsets, ideal_bound, min_alphabet_lower_bound,
    okhotin_witness, ENUMERATION_GUARD,
};
pub use product::{
    build_shuffle_nfa, shuffle_state_complexity, shuffle_state_complexity_generic, ShuffleNfa,
};
pub(crate) use subset::{column_of, low_bits, row_of};
pub use subset::{first_column_mask, grid_mask, is_valid_bits, ProductSubset, MAX_GRID_CELLS};

/// Condition (C): `s` meets both row 1 and column 1.
pub fn is_valid(s: &ProductSubset) -> bool {
    s.is_valid()
}

/// Occupied rows and columns of `s`.
pub fn projections(s: &ProductSubset) -> (Vec<usize>, Vec<usize>) {
    s.projections()
}
