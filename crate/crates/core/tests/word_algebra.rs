mod common;

use common::*;
use onerel::word_algebra::{
    coefficients, conjugacy_canonical, conjugacy_canonical_with_conjugator, cyclic_reduce, exponent_sum, free_reduce,
    is_conjugate_to_gt, is_cyclically_reduced, parse_word, t_shape, Letter, MixedWord, Sign, TShape, WordError,
};
use proptest::prelude::*;

fn abt() -> Vec<Letter> {
    alphabet("ab").letters()
}

#[test]
fn free_reduce_matches_naive_cancellation() {
    let letters = abt();
    for len in 0..=6 {
        for raw in all_sequences(&letters, len) {
            assert_eq!(free_reduce(&raw).letters(), naive_reduce(&raw).as_slice(), "{raw:?}");
        }
    }
}

#[test]
fn cyclic_reduce_matches_rotations() {
    for w in reduced_words(&abt(), 6) {
        let r = cyclic_reduce(&w);
        assert!(oracle_is_cyclically_reduced(r.reduced.letters()), "{w} -> {}", r.reduced);
        assert!(is_cyclically_reduced(&r.reduced));
        assert_eq!(is_cyclically_reduced(&w), oracle_is_cyclically_reduced(w.letters()), "{w}");
        assert!(oracle_cyclic_rotations(w.letters()).contains(&r.reduced.letters().to_vec()), "{w}");
        assert_eq!(r.reduced.conjugate_by(&r.conjugator), w);
        if oracle_is_cyclically_reduced(w.letters()) {
            assert_eq!(r.reduced, w);
            assert!(r.conjugator.is_identity());
        }
    }
}

#[test]
fn canonical_form_matches_conjugator_enumeration() {
    let conjugators = reduced_words(&abt(), 4);
    for w in reduced_words(&abt(), 6) {
        let (canonical, u) = conjugacy_canonical_with_conjugator(&w);
        assert_eq!(canonical.letters(), oracle_canonical(&w, &conjugators).as_slice(), "{w}");
        assert_eq!(canonical.conjugate_by(&u), w);
    }
}

#[test]
fn examples() {
    let ab = alphabet("ab");
    let w = |s: &str| parse_word(s, &ab).unwrap();
    assert_eq!(w("aAbtTB").to_string(), "");
    assert_eq!(cyclic_reduce(&w("tabT")).reduced.to_string(), "ab");
    assert_eq!(conjugacy_canonical(&w("tabT")).to_string(), "ab");
    assert_eq!(cyclic_reduce(&w("ta")).reduced.to_string(), "at");
    assert_eq!(conjugacy_canonical(&w("tbta")).to_string(), "atbt");
    assert_eq!(exponent_sum(&w("taTbTa")), -1);
    assert_eq!(t_shape(&w("atbtaTT")).exponents(), &[1, 1, -2]);
    assert_eq!(t_shape(&w("attbTa")).exponents(), &[2, -1]);
    assert_eq!(coefficients(&w("tatTTb")).iter().map(|g| g.to_string()).collect::<Vec<_>>(), ["", "a", "b"]);
    assert_eq!(is_conjugate_to_gt(&w("baBt")).map(|(g, s)| (g.to_string(), s)), Some(("baB".into(), Sign::Plus)));
    assert_eq!(is_conjugate_to_gt(&w("BtbA")).map(|(g, s)| (g.to_string(), s)), Some(("bAB".into(), Sign::Plus)));
    assert_eq!(is_conjugate_to_gt(&w("aTA")).map(|(g, s)| (g.to_string(), s)), Some(("".into(), Sign::Minus)));
    assert_eq!(is_conjugate_to_gt(&w("atat")), None);
    assert_eq!(parse_word("ac", &ab), Err(WordError::UnknownGenerator { position: 1, symbol: 'c' }));
    assert!(parse_word("a1", &ab).is_err());
    assert_eq!(TShape::new(vec![1, 0]), None);
}

fn mixed_word() -> impl Strategy<Value = MixedWord> {
    prop::collection::vec(prop::sample::select(alphabet("abc").letters()), 0..14).prop_map(|l| free_reduce(&l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reduction_is_idempotent(raw in prop::collection::vec(prop::sample::select(alphabet("abc").letters()), 0..20)) {
        let w = free_reduce(&raw);
        prop_assert_eq!(free_reduce(w.letters()), w.clone());
        prop_assert_eq!(exponent_sum(&w), raw.iter().map(|l| l.t_exponent()).sum::<i64>());
    }

    #[test]
    fn group_laws(x in mixed_word(), y in mixed_word(), z in mixed_word()) {
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert!(x.mul(&x.inverse()).is_identity());
        prop_assert_eq!(x.mul(&y).inverse(), y.inverse().mul(&x.inverse()));
    }

    #[test]
    fn canonical_form_is_a_class_invariant(w in mixed_word(), u in mixed_word()) {
        let conj = u.mul(&w).mul(&u.inverse());
        prop_assert_eq!(conjugacy_canonical(&conj), conjugacy_canonical(&w));
        prop_assert_eq!(exponent_sum(&conj), exponent_sum(&w));
        let c = conjugacy_canonical(&w);
        prop_assert_eq!(conjugacy_canonical(&c), c.clone());
        prop_assert_eq!(t_shape(&c).exponent_sum(), exponent_sum(&w));
    }

    #[test]
    fn parts_reassemble(w in mixed_word()) {
        prop_assert_eq!(MixedWord::from_parts(&w.head(), &w.blocks()), w.clone());
        let shown = w.to_string();
        prop_assert_eq!(parse_word(&shown, &alphabet("abc")).unwrap(), w);
    }
}
