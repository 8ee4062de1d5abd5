#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use onerel::sphere_complex::{to_json, ComplexBuilder, FaceType, RelatorSet, SphereComplex};
use onerel::word_algebra::{parse_word, Alphabet, BaseWord, Generator, Letter, MixedWord};

pub fn alphabet(symbols: &str) -> Alphabet {
    Alphabet::from_symbols(symbols).unwrap()
}

pub fn word(text: &str) -> MixedWord {
    parse_word(text, &Alphabet::of_rank(25).unwrap()).unwrap()
}

pub fn base(text: &str) -> BaseWord {
    BaseWord::parse(text, &Alphabet::of_rank(25).unwrap()).unwrap()
}

/// Every letter sequence (not necessarily reduced) of length `len`.
pub fn all_sequences(letters: &[Letter], len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|w| letters.iter().map(move |&l| [w.clone(), vec![l]].concat())).collect();
    }
    out
}

/// Freely reduced words of length at most `max_len`, shortest first.
pub fn reduced_words(letters: &[Letter], max_len: usize) -> Vec<MixedWord> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in letters {
                if w.last().copied() != Some(l.inv()) {
                    next.push([w.clone(), vec![l]].concat());
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.into_iter().map(MixedWord::from_letters).collect()
}

/// Cancels adjacent inverse pairs by rescanning until nothing changes.
pub fn naive_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut w = letters.to_vec();
    loop {
        let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i + 1] == w[i].inv()) else {
            return w;
        };
        w.drain(i..i + 2);
    }
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data").join(name)
}

/// Compares a fixture against its stored JSON; `ONEREL_BLESS=1` rewrites it.
pub fn assert_golden(name: &str, complex: &SphereComplex) {
    let path = data_path(name);
    let json = to_json(complex);
    if std::env::var_os("ONEREL_BLESS").is_some() {
        std::fs::write(&path, &json).unwrap();
    }
    let stored = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(stored, json, "golden {name} differs");
}

const I: Option<FaceType> = Some(FaceType::I);
const I_PRIME: Option<FaceType> = Some(FaceType::IPrime);
const II: Option<FaceType> = Some(FaceType::II);
const II_PRIME: Option<FaceType> = Some(FaceType::IIPrime);
const INF: Option<FaceType> = Some(FaceType::Infinity);

/// Triangle read as `t a t^-1 b t^-1 c`, closed up by an unlabelled face.
pub fn labelled_triangle() -> SphereComplex {
    ComplexBuilder::new()
        .vertex("p")
        .vertex("q")
        .vertex("r")
        .edge("x", "p", "q")
        .edge("y", "r", "q")
        .edge("z", "p", "r")
        .face("tri", None, &[("x", '+', Some("a")), ("y", '-', Some("b")), ("z", '-', Some("c"))])
        .face("out", None, &[("z", '+', None), ("y", '+', None), ("x", '-', None)])
        .build("out", "p")
        .unwrap()
}

pub fn tetrahedron() -> SphereComplex {
    ComplexBuilder::new()
        .vertex("0")
        .vertex("1")
        .vertex("2")
        .vertex("3")
        .edge("01", "0", "1")
        .edge("02", "0", "2")
        .edge("03", "0", "3")
        .edge("12", "1", "2")
        .edge("13", "1", "3")
        .edge("23", "2", "3")
        .face("a", None, &[("02", '+', None), ("12", '-', None), ("01", '-', None)])
        .face("b", None, &[("01", '+', None), ("13", '+', None), ("03", '-', None)])
        .face("c", None, &[("03", '+', None), ("23", '-', None), ("02", '-', None)])
        .face("d", None, &[("12", '+', None), ("23", '+', None), ("13", '-', None)])
        .build("a", "0")
        .unwrap()
}

/// Relators for the labelled fixtures: `w0 = b t^-1 a t c t` and the 2-gon
/// relator `t^-1 A t d` from `h = a^-1`, `phi(a) = d`.
pub fn fixture_relators() -> RelatorSet {
    let phi = BTreeMap::from([(Generator::new('a').unwrap(), base("d"))]);
    RelatorSet::with_phi(word("bTatct"), phi, &[base("A")], 1).unwrap()
}

/// Three faces on two vertices satisfying every subdivision property.
pub fn csl_passing() -> SphereComplex {
    ComplexBuilder::new()
        .vertex("v0")
        .vertex("x")
        .edge("e0", "v0", "v0")
        .edge("e1", "x", "v0")
        .edge("e2", "x", "v0")
        .face("inf", INF, &[("e0", '-', None)])
        .face("fw", I, &[("e1", '-', Some("a")), ("e2", '+', Some("c")), ("e0", '+', Some("b"))])
        .face("fh", II, &[("e2", '-', Some("A")), ("e1", '+', Some("d"))])
        .build("inf", "v0")
        .unwrap()
}

/// [`csl_passing`] with an extra pair of faces reading `w0` and `w0^-1`
/// glued along two edges.
pub fn mirrored() -> SphereComplex {
    ComplexBuilder::new()
        .vertex("v0")
        .vertex("x")
        .vertex("y")
        .edge("e0", "v0", "v0")
        .edge("e1a", "x", "v0")
        .edge("e1b", "x", "v0")
        .edge("e2", "x", "v0")
        .edge("r", "x", "y")
        .edge("s", "v0", "y")
        .face("inf", INF, &[("e0", '-', None)])
        .face("fw", I, &[("e1a", '-', Some("a")), ("e2", '+', Some("c")), ("e0", '+', Some("b"))])
        .face("fh", II, &[("e2", '-', Some("A")), ("e1b", '+', Some("d"))])
        .face("t1", I, &[("e1a", '+', Some("c")), ("s", '+', Some("b")), ("r", '-', Some("a"))])
        .face("t2", I_PRIME, &[("e1b", '-', Some("A")), ("r", '+', Some("B")), ("s", '-', Some("C"))])
        .build("inf", "v0")
        .unwrap()
}

/// Three 2-gons between `a` and `b` with labels `h_i` at `a` and
/// `(h_i phi)^-1` at `b`, where `phi(a) = c`, `phi(b) = d`.
pub fn two_gon_chain(hs: [&str; 3], types: [Option<FaceType>; 3]) -> SphereComplex {
    let phi = BTreeMap::from([
        (Generator::new('a').unwrap(), base("c")),
        (Generator::new('b').unwrap(), base("d")),
        (Generator::new('c').unwrap(), base("e")),
    ]);
    let set = RelatorSet::with_phi(MixedWord::t(), phi, &[], 1).unwrap();
    let at_b: Vec<String> = hs.iter().map(|h| set.apply_phi(&base(h)).unwrap().inverse().to_string()).collect();
    ComplexBuilder::new()
        .vertex("a")
        .vertex("b")
        .edge("e1", "a", "b")
        .edge("e2", "a", "b")
        .edge("e3", "a", "b")
        .face("f1", types[0], &[("e1", '+', Some(&at_b[0])), ("e2", '-', Some(hs[0]))])
        .face("f2", types[1], &[("e2", '+', Some(&at_b[1])), ("e3", '-', Some(hs[1]))])
        .face("f3", types[2], &[("e3", '+', Some(&at_b[2])), ("e1", '-', Some(hs[2]))])
        .build("f1", "a")
        .unwrap()
}

/// The chain whose labels at `a` multiply to 1; clockwise the faces at `a`
/// run f1, f3, f2.
pub fn trivial_chain() -> SphereComplex {
    two_gon_chain(["a", "BA", "b"], [II_PRIME; 3])
}

pub fn free_chain() -> SphereComplex {
    two_gon_chain(["a", "b", "c"], [II_PRIME; 3])
}

/// Two 2-gons glued along both of their edges.
pub fn bigon(labels: Option<[&str; 4]>, types: [Option<FaceType>; 2]) -> SphereComplex {
    let l = |i: usize| labels.map(|ls| ls[i]);
    ComplexBuilder::new()
        .vertex("u")
        .vertex("v")
        .edge("e", "u", "v")
        .edge("f", "u", "v")
        .face("p", types[0], &[("e", '+', l(0)), ("f", '-', l(1))])
        .face("q", types[1], &[("f", '+', l(2)), ("e", '-', l(3))])
        .build("p", "u")
        .unwrap()
}

/// `e_infinity` bounded by two edges traversed the same way.
pub fn two_edge_uphill() -> SphereComplex {
    ComplexBuilder::new()
        .vertex("v0")
        .vertex("w")
        .vertex("x")
        .edge("g1", "v0", "w")
        .edge("g2", "w", "v0")
        .edge("h", "v0", "x")
        .edge("k", "w", "x")
        .face("inf", INF, &[("g1", '+', None), ("g2", '+', None)])
        .face("upper", None, &[("g1", '-', None), ("h", '+', None), ("k", '-', None)])
        .face("lower", None, &[("g2", '-', None), ("k", '+', None), ("h", '-', None)])
        .build("inf", "v0")
        .unwrap()
}

pub fn letter_set(w: &MixedWord) -> BTreeSet<Letter> {
    w.letters().iter().copied().collect()
}

/// Cyclic reducedness read straight off the letters: free of cyclic
/// cancellation, and when `t` occurs the word ends in it and either starts
/// with a base letter or is a pure power of `t`.
pub fn oracle_is_cyclically_reduced(w: &[Letter]) -> bool {
    let (Some(first), Some(last)) = (w.first(), w.last()) else { return true };
    if !w.iter().any(|l| l.is_stable()) {
        return w.len() == 1 || *first != last.inv();
    }
    last.is_stable() && (!first.is_stable() || w.iter().all(|l| l.is_stable()))
}

/// Peels matching outer letters one at a time, then lists every rotation of
/// what remains.
pub fn oracle_cyclic_rotations(w: &[Letter]) -> Vec<Vec<Letter>> {
    let mut core = w.to_vec();
    while core.len() >= 2 && core[0] == core[core.len() - 1].inv() {
        core = core[1..core.len() - 1].to_vec();
    }
    if core.is_empty() {
        return vec![Vec::new()];
    }
    (0..core.len()).map(|k| [&core[k..], &core[..k]].concat()).collect()
}

/// `u w u^-1` for every reduced `u` of length at most `max_conj`, keeping the
/// least cyclically reduced one.
pub fn oracle_canonical(w: &MixedWord, conjugators: &[MixedWord]) -> Vec<Letter> {
    conjugators
        .iter()
        .map(|u| naive_reduce(&[u.letters(), w.letters(), u.inverse().letters()].concat()))
        .filter(|c| oracle_is_cyclically_reduced(c))
        .min()
        .expect("some conjugate is cyclically reduced")
}

/// Seeded random reduced words over `letters` with exponent sum `ex` and
/// length at most `max_len`, found by rejection.
pub fn random_words_with_exponent(
    seed: u64,
    letters: &[Letter],
    ex: i64,
    max_len: usize,
    count: usize,
) -> Vec<MixedWord> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let len = rng.gen_range(1..=max_len);
        let raw: Vec<Letter> = (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect();
        let w = MixedWord::from_letters(raw);
        if onerel::word_algebra::exponent_sum(&w) == ex && !w.is_empty() {
            out.push(w);
        }
    }
    out
}

/// Levels of a kernel element computed letter by letter: a base letter after
/// a prefix of exponent sum `s` sits at level `-s`.
pub fn oracle_levels(w: &MixedWord) -> Vec<i64> {
    let mut s = 0;
    let mut levels = Vec::new();
    for l in w.letters() {
        if l.is_stable() {
            s += l.t_exponent();
        } else {
            levels.push(-s);
        }
    }
    levels
}

/// Independent check of a block decomposition of `source`; returns the first
/// failed property.
pub fn check_decomposition(source: &MixedWord, d: &onerel::klyachko_strata::Lemma2Decomposition) -> Result<(), String> {
    use onerel::klyachko_strata::KernelForm;
    let m = d.m as i64;
    let range = |k: &KernelForm| -> Option<(i64, i64)> {
        let lv = oracle_levels(&k.expand());
        Some((*lv.iter().min()?, *lv.iter().max()?))
    };
    for (i, (b, a)) in d.pairs.iter().enumerate() {
        match range(b) {
            Some((0, hi)) if hi < m => {}
            r => return Err(format!("b{i} has levels {r:?}, m = {m}")),
        }
        match range(a) {
            Some((lo, hi)) if lo >= 0 && hi == m - 1 => {}
            r => return Err(format!("a{i} has levels {r:?}, m = {m}")),
        }
    }
    if let Some((lo, hi)) = range(&d.c) {
        if lo < 0 || hi > m - 1 {
            return Err(format!("c has levels ({lo}, {hi}), m = {m}"));
        }
    }
    // b0 t^-1 a0 t ... c t, conjugated back.
    let mut raw: Vec<Letter> = Vec::new();
    for (b, a) in &d.pairs {
        raw.extend_from_slice(b.expand().letters());
        raw.push(Letter::stable(onerel::word_algebra::Sign::Minus));
        raw.extend_from_slice(a.expand().letters());
        raw.push(Letter::stable(onerel::word_algebra::Sign::Plus));
    }
    raw.extend_from_slice(d.c.expand().letters());
    raw.push(Letter::stable(onerel::word_algebra::Sign::Plus));
    let u = d.conjugator.letters();
    let inv_u = d.conjugator.inverse();
    let back = naive_reduce(&[inv_u.letters(), &raw, u].concat());
    if back != source.letters() {
        return Err(format!("reassembly gives {} instead of {source}", MixedWord::from_letters(back)));
    }
    // Conjugate to g t exactly when some rotation of the cyclic core has a
    // single t.
    let single_t =
        oracle_cyclic_rotations(source.letters()).iter().any(|r| r.iter().filter(|l| l.is_stable()).count() == 1);
    if single_t != d.pairs.is_empty() {
        return Err(format!("{} pairs but single-t rotation is {single_t}", d.pairs.len()));
    }
    Ok(())
}

/// Cyclically reduced exponent-one words of length at most `max_len` over
/// `letters` that are not conjugate to `g t`.
pub fn non_gt_exponent_one_words(letters: &[Letter], max_len: usize) -> Vec<MixedWord> {
    reduced_words(letters, max_len)
        .into_iter()
        .filter(|w| onerel::word_algebra::exponent_sum(w) == 1)
        .filter(|w| oracle_is_cyclically_reduced(w.letters()))
        .filter(|w| w.letters().iter().filter(|l| l.is_stable()).count() > 1)
        .collect()
}

/// Replaces `t` by `image` in `w` and cancels.
pub fn oracle_substitute(w: &MixedWord, image: &BaseWord) -> Vec<Letter> {
    let image = image.to_mixed();
    let inverse = image.inverse();
    let raw: Vec<Letter> = w
        .letters()
        .iter()
        .flat_map(|&l| match l {
            Letter::Stable { inverse: false } => image.letters().to_vec(),
            Letter::Stable { inverse: true } => inverse.letters().to_vec(),
            base => vec![base],
        })
        .collect();
    naive_reduce(&raw)
}
