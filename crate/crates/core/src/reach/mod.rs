//! Reachability in the extremal subset automaton `D_{m,n}`: breadth-first
//! exploration with checkpoints, the reduction lemmas, and certificates
//! built from them.

mod alphabet;
mod bfs;
mod certify;
pub mod checkpoint;
mod letter;
mod reduce;
mod smaller;

pub use alphabet::{alphabet_sufficiency, greedy_alphabet, prune_alphabet, GREEDY_WORK_GUARD};
pub use bfs::{
    bfs_reach, AlphabetDescriptor, AlphabetSpec, CheckpointOptions, ReachOptions, ReachReport,
    ReachTree, FULL_ALPHABET_GRID_GUARD, FULL_ALPHABET_LETTER_GUARD, LETTER_LIST_GRID_GUARD,
    TREE_GRID_GUARD, UNREACHED_SAMPLE,
};
pub use certify::{
    certificate_word, certify, verify_certificate, Certificate, CertificateGap, CertificateNode,
    GridCertificate, Justification, LetterCodes, NodeRef, VerifyFailure, VerifyReport,
    CERTIFY_MAX_COLUMNS, CERTIFY_MAX_ROWS, CERTIFY_NODE_GUARD, FAILURE_SAMPLE,
};
pub use letter::{
    alphabet_id, extremal_step, full_alphabet, letters_to_json, parse_letters, ExtremalLetter,
};
pub(crate) use letter::{encode, step_bits};
pub use reduce::{
    anchor_scheme, reduce_containment, reduce_permutation, reduce_single_element, sperner_limit,
    AnchorScheme, Axis, ContainmentReduction, PermutationReduction, SingleElementReduction,
};
pub use smaller::{
    direct_predecessor, direct_smaller_check, DirectSmallerReport, DIRECT_SMALLER_GRID_GUARD,
    DIRECT_SMALLER_MIN_SIZE, EXCEPTION_SAMPLE,
};
