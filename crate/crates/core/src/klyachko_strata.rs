//! Level forms in the kernel `K` of the exponent sum, the strata of `K`
//! cut out by level bounds, and the block decomposition of exponent-one words.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::word_algebra::{
    conjugacy_canonical_with_conjugator, cyclic_reduce, exponent_sum, is_conjugate_to_gt, Alphabet, BaseLetter,
    BaseWord, Letter, MixedWord, Sign,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("exponent sum is {found}, expected {expected}")]
    ExponentSum { expected: i64, found: i64 },
    #[error("level bounds of the identity are undefined")]
    EmptyKernelForm,
    #[error("element does not lie in H for m = {m}")]
    NotInH { m: u32 },
    #[error("stratum parameter m must be positive")]
    InvalidM,
    #[error("no block decomposition found for {0}")]
    NoDecomposition(String),
}

/// `g^(t^level)`, that is `t^-level * g * t^level`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LevelFactor {
    pub element: BaseWord,
    pub level: i64,
}

/// An element of `K` as a product of level factors with nontrivial elements
/// and distinct adjacent levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct KernelForm {
    factors: Vec<LevelFactor>,
}

impl KernelForm {
    pub fn identity() -> Self {
        KernelForm::default()
    }

    /// Builds the normal form of an arbitrary product of level factors.
    pub fn from_factors<I: IntoIterator<Item = (BaseWord, i64)>>(factors: I) -> Self {
        let raw: Vec<Letter> =
            factors.into_iter().flat_map(|(g, level)| expand_factor(&g, level).letters().to_vec()).collect();
        kernel_canonical_form(&MixedWord::from_letters(raw)).expect("level factors have exponent sum zero")
    }

    pub fn factors(&self) -> &[LevelFactor] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn levels(&self) -> impl Iterator<Item = i64> + '_ {
        self.factors.iter().map(|f| f.level)
    }

    /// The word `prod t^-level g t^level`, freely reduced.
    pub fn expand(&self) -> MixedWord {
        MixedWord::product(self.factors.iter().map(|f| expand_factor(&f.element, f.level)).collect::<Vec<_>>().iter())
    }

    /// Conjugation by `t^shift`, which adds `shift` to every level.
    pub fn shifted(&self, shift: i64) -> KernelForm {
        KernelForm {
            factors: self
                .factors
                .iter()
                .map(|f| LevelFactor { element: f.element.clone(), level: f.level + shift })
                .collect(),
        }
    }

    pub fn mul(&self, other: &KernelForm) -> KernelForm {
        kernel_canonical_form(&self.expand().mul(&other.expand())).expect("product stays in K")
    }
}

impl fmt::Display for KernelForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "({})^t^{}", factor.element, factor.level)?;
        }
        Ok(())
    }
}

fn expand_factor(g: &BaseWord, level: i64) -> MixedWord {
    MixedWord::product([&MixedWord::t_power(-level), &g.to_mixed(), &MixedWord::t_power(level)])
}

/// Rewrites an exponent-sum-zero word as a product of level factors.
///
/// A base letter preceded by `t`-letters of total exponent `s` sits at level
/// `-s`. In a reduced word consecutive runs of base letters are separated by
/// nonzero `t`-powers, so each maximal run is one factor.
pub fn kernel_canonical_form(w: &MixedWord) -> Result<KernelForm, StrataError> {
    let ex = exponent_sum(w);
    if ex != 0 {
        return Err(StrataError::ExponentSum { expected: 0, found: ex });
    }
    let mut factors: Vec<LevelFactor> = Vec::new();
    let mut prefix_sum = 0i64;
    let mut run: Vec<BaseLetter> = Vec::new();
    let flush = |run: &mut Vec<BaseLetter>, level: i64, factors: &mut Vec<LevelFactor>| {
        if !run.is_empty() {
            factors.push(LevelFactor { element: BaseWord::from_letters(run.drain(..)), level });
        }
    };
    for &l in w.letters() {
        match l {
            Letter::Base(b) => run.push(b),
            Letter::Stable { .. } => {
                flush(&mut run, -prefix_sum, &mut factors);
                prefix_sum += l.t_exponent();
            }
        }
    }
    flush(&mut run, -prefix_sum, &mut factors);
    Ok(KernelForm { factors })
}

/// `(min, max)` of the levels.
pub fn level_bounds(k: &KernelForm) -> Result<(i64, i64), StrataError> {
    let min = k.levels().min().ok_or(StrataError::EmptyKernelForm)?;
    let max = k.levels().max().ok_or(StrataError::EmptyKernelForm)?;
    Ok((min, max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StratumParams {
    m: u32,
}

impl StratumParams {
    pub fn new(m: u32) -> Result<Self, StrataError> {
        if m == 0 {
            return Err(StrataError::InvalidM);
        }
        Ok(StratumParams { m })
    }

    pub fn m(self) -> u32 {
        self.m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct StratumFlags {
    pub h: bool,
    pub h_prime: bool,
    pub j: bool,
    pub x: bool,
    pub y: bool,
    pub z: bool,
}

/// Membership in the six strata. The identity lies in the subgroups `H`,
/// `H'`, `J` and in none of the subsets `X`, `Y`, `Z`.
pub fn stratum_membership(k: &KernelForm, params: StratumParams) -> StratumFlags {
    let m = params.m as i64;
    let Ok((lo, hi)) = level_bounds(k) else {
        return StratumFlags { h: true, h_prime: true, j: true, x: false, y: false, z: false };
    };
    StratumFlags {
        h: lo >= 0 && hi <= m - 2,
        h_prime: lo >= 1 && hi < m,
        j: lo >= 0 && hi < m,
        x: lo == 0 && hi < m,
        y: lo >= 0 && hi == m - 1,
        z: lo >= 1 && hi == m,
    }
}

/// The isomorphism `H -> H'`, `h -> t^-1 h t`.
pub fn phi(h: &KernelForm, params: StratumParams) -> Result<KernelForm, StrataError> {
    if !stratum_membership(h, params).h {
        return Err(StrataError::NotInH { m: params.m });
    }
    Ok(h.shifted(1))
}

/// `w` conjugated to `b0 a0^t b1 a1^t ... br ar^t c t` with `b_i` in `X`,
/// `a_i` in `Y` and `c` in `J`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma2Decomposition {
    pub m: u32,
    pub pairs: Vec<(KernelForm, KernelForm)>,
    pub c: KernelForm,
    /// `conjugator^-1 * reassembled * conjugator` is the source word.
    pub conjugator: MixedWord,
}

impl Lemma2Decomposition {
    pub fn params(&self) -> StratumParams {
        StratumParams::new(self.m).expect("m is positive")
    }

    /// The word `b0 a0^t ... br ar^t c t`.
    pub fn reassemble(&self) -> MixedWord {
        let mut parts = Vec::new();
        for (b, a) in &self.pairs {
            parts.push(b.expand());
            parts.push(a.shifted(1).expand());
        }
        parts.push(self.c.expand());
        parts.push(MixedWord::t());
        MixedWord::product(parts.iter())
    }

    pub fn reassembled_conjugate(&self) -> MixedWord {
        self.reassemble().conjugate_by(&self.conjugator)
    }

    /// Checks every structural invariant against `source`.
    pub fn verify(&self, source: &MixedWord) -> bool {
        let params = self.params();
        let strata_ok =
            self.pairs.iter().all(|(b, a)| stratum_membership(b, params).x && stratum_membership(a, params).y)
                && stratum_membership(&self.c, params).j;
        let gt = is_conjugate_to_gt(source).is_some();
        strata_ok && self.reassembled_conjugate() == *source && self.pairs.is_empty() == gt
    }
}

fn rotate(w: &MixedWord, k: usize) -> (MixedWord, MixedWord) {
    let letters = w.letters();
    let rotated = MixedWord::from_letters(letters[k..].iter().chain(&letters[..k]).copied());
    (rotated, MixedWord::from_letters(letters[..k].iter().copied()))
}

struct Split {
    pairs: Vec<(KernelForm, KernelForm)>,
    c: KernelForm,
}

fn block(factors: &[LevelFactor], shift: i64) -> KernelForm {
    KernelForm { factors: factors.to_vec() }.shifted(shift)
}

/// Splits a kernel form with levels in `[0, m]` into `B0 A0 B1 A1 ... C`
/// where each `B` contains level 0 and no `m`, each `A` contains `m` and no
/// 0, and `C` avoids `m`.
fn greedy_split(k: &KernelForm, m: i64) -> Option<Split> {
    let f = k.factors();
    let mut pairs = Vec::new();
    let mut pos = 0;
    loop {
        let Some(first_top) = (pos..f.len()).find(|&i| f[i].level == m) else {
            return Some(Split { pairs, c: block(&f[pos..], 0) });
        };
        let b = &f[pos..first_top];
        if !b.iter().any(|x| x.level == 0) {
            return None;
        }
        let run_end = (first_top..f.len()).find(|&i| f[i].level == 0).unwrap_or(f.len());
        let last_top = (first_top..run_end).rev().find(|&i| f[i].level == m).expect("first_top is in range");
        pairs.push((block(b, 0), block(&f[first_top..=last_top], -1)));
        pos = last_top + 1;
    }
}

/// Decomposes an exponent-one word, choosing the least `m` over all
/// rotations of its cyclic reduction and breaking ties by rotation index.
pub fn lemma2_decompose(w: &MixedWord) -> Result<Lemma2Decomposition, StrataError> {
    let ex = exponent_sum(w);
    if ex != 1 {
        return Err(StrataError::ExponentSum { expected: 1, found: ex });
    }
    if let Some((g, sign)) = is_conjugate_to_gt(w) {
        debug_assert_eq!(sign, Sign::Plus);
        let (canonical, conjugator) = conjugacy_canonical_with_conjugator(w);
        debug_assert_eq!(canonical, g.to_mixed().mul(&MixedWord::t()));
        let c = if g.is_identity() {
            KernelForm::identity()
        } else {
            KernelForm { factors: vec![LevelFactor { element: g, level: 0 }] }
        };
        return Ok(Lemma2Decomposition { m: 1, pairs: Vec::new(), c, conjugator });
    }
    let reduction = cyclic_reduce(w);
    let core = &reduction.reduced;
    let mut best: Option<(i64, Lemma2Decomposition)> = None;
    for i in 0..core.len() {
        let (rotated, prefix) = rotate(core, i);
        let k = kernel_canonical_form(&rotated.mul(&MixedWord::t_power(-1))).expect("exponent sum is zero");
        let Ok((lo, hi)) = level_bounds(&k) else { continue };
        let m = hi - lo;
        if m == 0 || best.as_ref().is_some_and(|(bm, _)| *bm <= m) {
            continue;
        }
        let shifted = k.shifted(-lo);
        let Some(split) = greedy_split(&shifted, m) else { continue };
        // rotated = t^-lo * (shifted * t) * t^lo and core = prefix * rotated * prefix^-1.
        let conjugator = MixedWord::product([&MixedWord::t_power(lo), &prefix.inverse(), &reduction.conjugator]);
        let decomposition = Lemma2Decomposition { m: m as u32, pairs: split.pairs, c: split.c, conjugator };
        best = Some((m, decomposition));
    }
    best.map(|(_, d)| d).ok_or_else(|| StrataError::NoDecomposition(w.to_string()))
}

/// A letter of `G * <s> * <t>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoVarLetter {
    Base(BaseLetter),
    T(Sign),
    S(Sign),
}

impl TwoVarLetter {
    fn inv(self) -> Self {
        match self {
            TwoVarLetter::Base(b) => TwoVarLetter::Base(b.inv()),
            TwoVarLetter::T(s) => TwoVarLetter::T(s.flip()),
            TwoVarLetter::S(s) => TwoVarLetter::S(s.flip()),
        }
    }
}

/// A freely reduced word over `G`, `s` and `t`. Displayed with `σ`/`Σ` for
/// `s`/`s^-1` since `s` may name a generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TwoVariableWord(Vec<TwoVarLetter>);

impl TwoVariableWord {
    pub fn from_letters<I: IntoIterator<Item = TwoVarLetter>>(letters: I) -> Self {
        let mut stack: Vec<TwoVarLetter> = Vec::new();
        for l in letters {
            if stack.last() == Some(&l.inv()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        TwoVariableWord(stack)
    }

    pub fn letters(&self) -> &[TwoVarLetter] {
        &self.0
    }

    /// Replaces `s` by `word` (a word in `G * <t>`) and reduces.
    pub fn substitute_s(&self, word: &MixedWord) -> MixedWord {
        let mut raw = Vec::new();
        for &l in &self.0 {
            match l {
                TwoVarLetter::Base(b) => raw.push(Letter::Base(b)),
                TwoVarLetter::T(sign) => raw.push(Letter::stable(sign)),
                TwoVarLetter::S(Sign::Plus) => raw.extend_from_slice(word.letters()),
                TwoVarLetter::S(Sign::Minus) => raw.extend(word.inverse().letters().iter().copied()),
            }
        }
        MixedWord::from_letters(raw)
    }
}

impl fmt::Display for TwoVariableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            let c = match l {
                TwoVarLetter::Base(b) => b.to_char(),
                TwoVarLetter::T(Sign::Plus) => 't',
                TwoVarLetter::T(Sign::Minus) => 'T',
                TwoVarLetter::S(Sign::Plus) => 'σ',
                TwoVarLetter::S(Sign::Minus) => 'Σ',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl Serialize for TwoVariableWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn lift(w: &MixedWord) -> impl Iterator<Item = TwoVarLetter> + '_ {
    w.letters().iter().map(|&l| match l {
        Letter::Base(b) => TwoVarLetter::Base(b),
        Letter::Stable { inverse } => TwoVarLetter::T(if inverse { Sign::Minus } else { Sign::Plus }),
    })
}

/// `b0(t) s^-1 a0(t) s ... br(t) s^-1 ar(t) s c(t) s`.
pub fn build_two_variable_word(d: &Lemma2Decomposition) -> TwoVariableWord {
    let mut raw = Vec::new();
    for (b, a) in &d.pairs {
        let (b, a) = (b.expand(), a.expand());
        raw.extend(lift(&b));
        raw.push(TwoVarLetter::S(Sign::Minus));
        raw.extend(lift(&a));
        raw.push(TwoVarLetter::S(Sign::Plus));
    }
    raw.extend(lift(&d.c.expand()));
    raw.push(TwoVarLetter::S(Sign::Plus));
    TwoVariableWord::from_letters(raw)
}

/// Generators of `H` (levels `0..=m-2`) or `H'` (levels `1..=m-1`) as level
/// factors of single generators.
pub fn subgroup_generators(alphabet: &Alphabet, params: StratumParams, prime: bool) -> Vec<KernelForm> {
    let m = params.m as i64;
    let (lo, hi) = if prime { (1, m - 1) } else { (0, m - 2) };
    (lo..=hi)
        .flat_map(|level| {
            alphabet
                .generators()
                .map(move |g| KernelForm { factors: vec![LevelFactor { element: BaseWord::generator(g), level }] })
        })
        .collect()
}

/// Bounded check that `element` is free relative to the subgroup generated by
/// `generators`: every formally reduced word of length at most `max_len` in
/// `element` and the generators must be nontrivial in `K`. Returns a
/// violating word as indices (`0` is `element`, `i` is generator `i - 1`,
/// negative for inverses).
pub fn find_relative_relation(element: &KernelForm, generators: &[KernelForm], max_len: usize) -> Option<Vec<i32>> {
    let symbols: Vec<MixedWord> = std::iter::once(element).chain(generators).map(|k| k.expand()).collect();
    let n = symbols.len() as i32;
    let alphabet: Vec<i32> = (1..=n).flat_map(|i| [i, -i]).collect();
    let mut frontier: Vec<(Vec<i32>, MixedWord)> = vec![(Vec::new(), MixedWord::identity())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, value) in &frontier {
            for &s in &alphabet {
                if word.last() == Some(&-s) {
                    continue;
                }
                let sym = &symbols[(s.unsigned_abs() - 1) as usize];
                let value = if s > 0 { value.mul(sym) } else { value.mul(&sym.inverse()) };
                let mut word = word.clone();
                word.push(s);
                if value.is_identity() {
                    return Some(word.iter().map(|&x| x.signum() * (x.abs() - 1)).collect());
                }
                next.push((word, value));
            }
        }
        frontier = next;
    }
    None
}
