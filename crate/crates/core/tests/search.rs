mod common;

use ssc_core::search::{
    bound_reachable_with, canonical_pair, count_right_dfas, max_shuffle_complexity,
    min_witness_alphabet, RightCountOptions, RightIsomorphism,
};
use ssc_core::shuffle::shuffle_state_complexity;

#[test]
fn two_by_two_witness_structure_is_unique() {
    let r = max_shuffle_complexity(2, 2, 4, usize::MAX).unwrap();
    assert_eq!(r.max, 10);
    assert!(r.met);
    let fig1 = canonical_pair(
        &common::fixture("fig1_k.json"),
        &common::fixture("fig1_l.json"),
    )
    .unwrap();
    assert!(r.witnesses.contains(&fig1));
    // one transition structure; each of its four final-set choices meets the bound
    assert_eq!(r.structure_count, 1);
    assert_eq!(r.witness_count, 4);
    assert!(r
        .witnesses
        .iter()
        .all(|w| w.structure() == fig1.structure()));
    for pair in r.witness_pairs() {
        assert_eq!(
            shuffle_state_complexity(&pair.left, &pair.right).unwrap(),
            10
        );
    }
}

#[test]
fn three_letters_never_meet_the_two_by_two_bound() {
    let r = max_shuffle_complexity(2, 2, 3, 0).unwrap();
    assert!(!r.met);
    assert!(r.max < 10);
    assert_eq!(min_witness_alphabet(2, 2, 1..=3).unwrap(), None);
    assert_eq!(min_witness_alphabet(2, 2, 1..=5).unwrap(), Some(4));
}

#[test]
fn two_by_three_needs_six_letters() {
    assert!(!bound_reachable_with(2, 3, 5).unwrap());
    assert_eq!(min_witness_alphabet(2, 3, 1..=6).unwrap(), Some(6));
}

/// Full enumeration of six-letter pairs with two and three states
/// (about a minute and a half on one core).
#[test]
#[ignore]
fn two_by_three_witnesses() {
    let r = max_shuffle_complexity(2, 3, 6, usize::MAX).unwrap();
    assert_eq!(r.max, 44);
    assert!(r.met);
    let example = canonical_pair(
        &common::fixture("ex1b_k.json"),
        &common::fixture("ex1b_l.json"),
    )
    .unwrap();
    assert!(r.witnesses.contains(&example));
    println!(
        "witness pairs: {}, structures: {}",
        r.witness_count, r.structure_count
    );
    for ignore_finals in [false, true] {
        for isomorphism in [RightIsomorphism::PerDfa, RightIsomorphism::Joint] {
            let count = count_right_dfas(
                &r.witnesses,
                RightCountOptions {
                    ignore_finals,
                    isomorphism,
                },
            );
            println!("right DFAs (ignore_finals={ignore_finals}, {isomorphism:?}): {count}");
        }
    }
}
