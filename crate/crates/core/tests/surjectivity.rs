mod common;

use common::*;
use onerel::surjectivity_analyzer::{
    amenable_shape, analyze, analyze_corroborated, certificate_verdict, collapse_isomorphism, normal_closure_search,
    order_evidence, quotient_certificate, verify_certificate, AnalyzeError, Evidence, Presentation, Reason,
    SearchBounds, ShapeRegistry, ShapeSource, Status,
};
use onerel::word_algebra::{exponent_sum, t_shape, Letter, MixedWord, Sign, TShape};
use rand::{Rng, SeedableRng};

fn ab() -> onerel::word_algebra::Alphabet {
    alphabet("ab")
}

#[test]
fn exponent_sum_other_than_one_is_never_surjective() {
    let mut count = 0;
    for w in reduced_words(&ab().letters(), 6).into_iter().skip(1) {
        let ex = exponent_sum(&w);
        if ex.abs() == 1 {
            continue;
        }
        let v = analyze(&w, 2).unwrap();
        assert_eq!((v.status, v.reason), (Status::NotSurjective, Reason::ExponentSum), "{w}");
        assert_eq!(v.evidence, Evidence::ExponentSum { exponent_sum: ex });
        count += 1;
    }
    assert!(count > 10_000);
    assert_eq!(analyze(&MixedWord::identity(), 2), Err(AnalyzeError::TrivialWord));
    assert_eq!(analyze(&word("ct"), 2), Err(AnalyzeError::OutsideAlphabet('c')));
}

fn random_gt_conjugates(seed: u64, count: usize) -> Vec<(MixedWord, Sign)> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let all = ab().letters();
    let base: Vec<Letter> = all.iter().copied().filter(|l| !l.is_stable()).collect();
    (0..count)
        .map(|_| {
            let u = MixedWord::from_letters((0..rng.gen_range(0..=5)).map(|_| all[rng.gen_range(0..all.len())]));
            let g = MixedWord::from_letters((0..rng.gen_range(0..=4)).map(|_| base[rng.gen_range(0..base.len())]));
            let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            let w = MixedWord::product([&u, &g, &MixedWord::t_power(sign.as_i64()), &u.inverse()]);
            (w, sign)
        })
        .collect()
}

#[test]
fn gt_conjugates_collapse() {
    for (w, sign) in random_gt_conjugates(3, 100) {
        let v = analyze(&w, 2).unwrap();
        assert_eq!((v.status, v.reason), (Status::Surjective, Reason::GtCollapse), "{w}");
        let c = collapse_isomorphism(&w).unwrap();
        assert!(c.verified);
        assert_eq!(c.sign, sign);
        assert!(oracle_substitute(&w, &c.t_image).is_empty(), "{w}");
        assert_eq!(v.evidence, Evidence::Collapse(c));
    }
    assert_eq!(collapse_isomorphism(&word("atat")), Err(AnalyzeError::NotGtForm));
}

#[test]
fn exponent_one_verdicts() {
    for text in ["atbTat", "aTatt", "bTatct", "atataT", "abtAtBT"] {
        let w = word(text);
        let v = analyze(&w, 3).unwrap();
        assert_eq!((v.status, v.reason), (Status::NotSurjective, Reason::MainTheorem), "{text}");
    }
    let w = word("atbTat");
    let v = analyze_corroborated(&w, &ab(), SearchBounds { conj_len: 2, products: 2 }, 4).unwrap();
    let Evidence::Theorem { exponent_sum: 1, corroboration: Some(c) } = v.evidence else { panic!("{v:?}") };
    assert_eq!(c.search_witness, None);
    if let Some(cert) = &c.certificate {
        assert!(verify_certificate(&Presentation::one_relator(ab(), &w).unwrap(), cert));
    }
    // Collapsing verdicts carry no corroboration.
    let v = analyze_corroborated(&word("bat"), &ab(), SearchBounds { conj_len: 2, products: 2 }, 4).unwrap();
    assert_eq!(v.reason, Reason::GtCollapse);
}

#[test]
fn certificate_golden() {
    let pres = Presentation::one_relator(alphabet("a"), &word("aTatt")).unwrap();
    let cert = quotient_certificate(&pres, 5).unwrap().expect("certificate");
    assert_eq!(cert.degree, 3);
    assert_eq!(cert.images[&'a'], vec![1, 0, 2]);
    assert_eq!(cert.images[&'t'], vec![1, 2, 0]);
    assert!(verify_certificate(&pres, &cert));
    let mut forged = cert.clone();
    forged.images.insert('a', vec![0, 1, 2]);
    assert!(!verify_certificate(&pres, &forged));
    let v = certificate_verdict(&pres, 5).unwrap();
    assert_eq!((v.status, v.reason), (Status::NotSurjective, Reason::QuotientCertificate));

    let at = Presentation::one_relator(alphabet("a"), &word("at")).unwrap();
    assert_eq!(quotient_certificate(&at, 6).unwrap(), None);
    assert_eq!(certificate_verdict(&at, 4).unwrap().status, Status::Undetermined);
    assert_eq!(quotient_certificate(&at, 9), Err(AnalyzeError::DegreeTooLarge(9)));
}

#[test]
fn order_goldens() {
    let pres = Presentation::one_relator(alphabet("a"), &word("at")).unwrap();
    let ev = order_evidence(&word("t"), &pres, 5).unwrap();
    assert_eq!(ev.per_degree.iter().map(|d| d.order).collect::<Vec<_>>(), [1, 2, 3, 4, 6]);
    assert_eq!(ev.best, 6);
    let shape_error = order_evidence(&word("taT"), &pres, 3);
    assert!(matches!(shape_error, Err(AnalyzeError::ShapePrecondition(_))));
}

/// Every product of at most `k` conjugates `u w^+-1 u^-1` with `|u| <= len`,
/// multiplied out directly.
fn brute_force_closure(w: &MixedWord, len: usize, k: usize, target: &TShape) -> bool {
    let mut conjugates: Vec<MixedWord> = Vec::new();
    for u in reduced_words(&ab().letters(), len) {
        for x in [w.clone(), w.inverse()] {
            conjugates.push(MixedWord::product([&u, &x, &u.inverse()]));
        }
    }
    let mut layer = vec![MixedWord::identity()];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &layer {
            for c in &conjugates {
                let q = p.mul(c);
                if t_shape(&q) == *target {
                    return true;
                }
                next.push(q);
            }
        }
        layer = next;
    }
    false
}

#[test]
fn search_agrees_with_brute_force() {
    let target = TShape::new(vec![1]).unwrap();
    let mut found = 0;
    for w in non_gt_exponent_one_words(&ab().letters(), 4).into_iter().chain(["at", "tab", "Btb"].map(word)) {
        let got = normal_closure_search(&w, &ab(), &target, SearchBounds { conj_len: 1, products: 2 }).unwrap();
        assert_eq!(got.is_some(), brute_force_closure(&w, 1, 2, &target), "{w}");
        if let Some(witness) = got {
            found += 1;
            assert_eq!(t_shape(&witness.element), target);
            let parts: Vec<MixedWord> = witness
                .factors
                .iter()
                .map(|f| {
                    let x = if f.sign == Sign::Plus { w.clone() } else { w.inverse() };
                    MixedWord::product([&f.conjugator, &x, &f.conjugator.inverse()])
                })
                .collect();
            assert_eq!(MixedWord::product(parts.iter()), witness.element);
        }
    }
    assert!(found >= 3);
    assert_eq!(
        normal_closure_search(&word("at"), &ab(), &target, SearchBounds { conj_len: 0, products: 1 }),
        Err(AnalyzeError::ZeroBound)
    );
}

#[test]
fn bounded_search_misses_t_for_long_relator() {
    let target = TShape::new(vec![1]).unwrap();
    let bounds = SearchBounds { conj_len: 3, products: 3 };
    assert_eq!(normal_closure_search(&word("bTatat"), &ab(), &target, bounds).unwrap(), None);
}

#[test]
fn shape_amenability() {
    let mut registry = ShapeRegistry::new();
    let builtin = |e: Vec<i64>| amenable_shape(&TShape::new(e).unwrap(), &ShapeRegistry::new());
    assert!(builtin(vec![1]).amenable);
    assert!(builtin(vec![-1, 1, 1]).amenable);
    assert!(builtin(vec![1, -1, 1]).amenable);
    assert_eq!(builtin(vec![2, -1]).source, ShapeSource::Unknown);
    registry.insert(TShape::new(vec![2, -1]).unwrap(), true);
    let a = amenable_shape(&TShape::new(vec![2, -1]).unwrap(), &registry);
    assert_eq!((a.amenable, a.source), (true, ShapeSource::Registry));
}
