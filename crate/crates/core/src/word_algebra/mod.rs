//! Words in a free group `G` and in the free product `G * <t>`.
//!
//! The base group is free on single-character generators (`a`..`z`, never
//! `t`). Because `G` is free, `G * <t>` is itself free on the generators
//! plus `t`, so an element is stored as one freely reduced letter sequence.
//! The alternating form `g0 t^q1 g1 ... t^qn gn` is derived from it on demand.

mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::parse_word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown generator '{symbol}' at position {position}")]
    UnknownGenerator { position: usize, symbol: char },
    #[error("'{0}' cannot be used as a generator")]
    InvalidGenerator(char),
    #[error("rank {0} exceeds the 25 available generator symbols")]
    RankTooLarge(usize),
    #[error("word contains the stable letter where a base-group element was expected")]
    NotInBase,
}

/// A generator of the base group, named by a lowercase letter other than `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(u8);

impl Generator {
    pub fn new(symbol: char) -> Result<Self, WordError> {
        if symbol.is_ascii_lowercase() && symbol != 't' {
            Ok(Generator(symbol as u8))
        } else {
            Err(WordError::InvalidGenerator(symbol))
        }
    }

    pub fn symbol(self) -> char {
        self.0 as char
    }
}

/// The finite generating set of `G`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Alphabet(BTreeSet<Generator>);

impl Alphabet {
    /// The first `rank` letters of the alphabet, skipping `t`.
    pub fn of_rank(rank: usize) -> Result<Self, WordError> {
        let gens: BTreeSet<_> = ('a'..='z').filter(|&c| c != 't').take(rank).map(|c| Generator(c as u8)).collect();
        if gens.len() < rank {
            return Err(WordError::RankTooLarge(rank));
        }
        Ok(Alphabet(gens))
    }

    pub fn from_symbols(symbols: &str) -> Result<Self, WordError> {
        symbols.chars().map(Generator::new).collect::<Result<_, _>>().map(Alphabet)
    }

    pub fn contains(&self, g: Generator) -> bool {
        self.0.contains(&g)
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.0.iter().copied()
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// All letters of `G * <t>` over this alphabet, in letter order.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out: Vec<Letter> =
            self.generators().flat_map(|g| [Letter::base(g, false), Letter::base(g, true)]).collect();
        out.push(Letter::T);
        out.push(Letter::T_INV);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseLetter {
    pub generator: Generator,
    pub inverse: bool,
}

impl BaseLetter {
    pub fn inv(self) -> Self {
        BaseLetter { generator: self.generator, inverse: !self.inverse }
    }

    pub fn to_char(self) -> char {
        let c = self.generator.symbol();
        if self.inverse {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }
}

/// A letter of `G * <t>`.
///
/// The derived order is the canonical letter order: generators alphabetically,
/// each generator before its inverse, then `t`, then `t^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Base(BaseLetter),
    Stable { inverse: bool },
}

impl Letter {
    pub const T: Letter = Letter::Stable { inverse: false };
    pub const T_INV: Letter = Letter::Stable { inverse: true };

    pub fn base(generator: Generator, inverse: bool) -> Letter {
        Letter::Base(BaseLetter { generator, inverse })
    }

    pub fn stable(sign: Sign) -> Letter {
        Letter::Stable { inverse: sign == Sign::Minus }
    }

    pub fn inv(self) -> Letter {
        match self {
            Letter::Base(b) => Letter::Base(b.inv()),
            Letter::Stable { inverse } => Letter::Stable { inverse: !inverse },
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, Letter::Stable { .. })
    }

    /// Contribution of this letter to the exponent sum of `t`.
    pub fn t_exponent(self) -> i64 {
        match self {
            Letter::Base(_) => 0,
            Letter::Stable { inverse: false } => 1,
            Letter::Stable { inverse: true } => -1,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::Base(b) => b.to_char(),
            Letter::Stable { inverse: false } => 't',
            Letter::Stable { inverse: true } => 'T',
        }
    }
}

fn push_reduced<L: Copy + PartialEq>(stack: &mut Vec<L>, letter: L, inv: impl Fn(L) -> L) {
    if stack.last().copied() == Some(inv(letter)) {
        stack.pop();
    } else {
        stack.push(letter);
    }
}

/// A freely reduced word in the base group `G`. The empty word is `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BaseWord(Vec<BaseLetter>);

impl BaseWord {
    pub fn identity() -> Self {
        BaseWord(Vec::new())
    }

    pub fn from_letters<I: IntoIterator<Item = BaseLetter>>(letters: I) -> Self {
        let mut stack = Vec::new();
        for l in letters {
            push_reduced(&mut stack, l, BaseLetter::inv);
        }
        BaseWord(stack)
    }

    pub fn generator(g: Generator) -> Self {
        BaseWord(vec![BaseLetter { generator: g, inverse: false }])
    }

    /// Parses a word that must not contain `t`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self, WordError> {
        parse_word(text, alphabet)?.as_base().ok_or(WordError::NotInBase)
    }

    pub fn letters(&self) -> &[BaseLetter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        BaseWord(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn mul(&self, other: &BaseWord) -> BaseWord {
        BaseWord::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn product<'a, I: IntoIterator<Item = &'a BaseWord>>(words: I) -> BaseWord {
        BaseWord::from_letters(words.into_iter().flat_map(|w| w.0.iter().copied()))
    }

    pub fn to_mixed(&self) -> MixedWord {
        MixedWord { letters: self.0.iter().map(|&b| Letter::Base(b)).collect() }
    }

    pub fn generators_used(&self) -> BTreeSet<Generator> {
        self.0.iter().map(|l| l.generator).collect()
    }
}

impl fmt::Display for BaseWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.to_char()))
    }
}

/// One `t^q g` block of the alternating form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Block {
    pub exponent: i64,
    pub tail: BaseWord,
}

/// The sequence `(q1, ..., qn)` of nonzero `t`-exponents of a reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct TShape(pub Vec<i64>);

impl TShape {
    pub fn new(exponents: Vec<i64>) -> Option<Self> {
        exponents.iter().all(|&q| q != 0).then_some(TShape(exponents))
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn exponent_sum(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for TShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, ")")
    }
}

/// An element of `G * <t>` as a freely reduced letter sequence.
///
/// Free reduction in `G * <t>` coincides with free reduction over the letters
/// of `G` plus `t`, so the reduced sequence is exactly the reduced alternating
/// word: interior coefficients are nontrivial and every `t`-run has a
/// nonzero exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MixedWord {
    letters: Vec<Letter>,
}

impl MixedWord {
    pub fn identity() -> Self {
        MixedWord::default()
    }

    pub fn t() -> Self {
        MixedWord { letters: vec![Letter::T] }
    }

    /// `t^k`.
    pub fn t_power(k: i64) -> Self {
        let letter = if k >= 0 { Letter::T } else { Letter::T_INV };
        MixedWord { letters: vec![letter; k.unsigned_abs() as usize] }
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        free_reduce_iter(letters)
    }

    pub fn from_parts(head: &BaseWord, blocks: &[Block]) -> Self {
        let mut raw: Vec<Letter> = head.letters().iter().map(|&b| Letter::Base(b)).collect();
        for block in blocks {
            raw.extend(MixedWord::t_power(block.exponent).letters);
            raw.extend(block.tail.letters().iter().map(|&b| Letter::Base(b)));
        }
        free_reduce(&raw)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        MixedWord { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn mul(&self, other: &MixedWord) -> MixedWord {
        let mut stack = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut stack, l, Letter::inv);
        }
        MixedWord { letters: stack }
    }

    pub fn product<'a, I: IntoIterator<Item = &'a MixedWord>>(words: I) -> MixedWord {
        free_reduce_iter(words.into_iter().flat_map(|w| w.letters.iter().copied()))
    }

    /// `u^-1 * self * u`.
    pub fn conjugate_by(&self, u: &MixedWord) -> MixedWord {
        MixedWord::product([&u.inverse(), self, u])
    }

    /// The element as a base-group word, if it contains no `t`.
    pub fn as_base(&self) -> Option<BaseWord> {
        self.letters
            .iter()
            .map(|l| match l {
                Letter::Base(b) => Some(*b),
                Letter::Stable { .. } => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(BaseWord)
    }

    pub fn head(&self) -> BaseWord {
        BaseWord(
            self.letters
                .iter()
                .map_while(|l| match l {
                    Letter::Base(b) => Some(*b),
                    Letter::Stable { .. } => None,
                })
                .collect(),
        )
    }

    pub fn blocks(&self) -> Vec<Block> {
        let mut blocks: Vec<Block> = Vec::new();
        let mut in_tail = false;
        for &l in self.letters.iter().skip(self.head().len()) {
            match l {
                Letter::Stable { .. } => {
                    if in_tail || blocks.is_empty() {
                        blocks.push(Block { exponent: 0, tail: BaseWord::identity() });
                        in_tail = false;
                    }
                    blocks.last_mut().expect("pushed above").exponent += l.t_exponent();
                }
                Letter::Base(b) => {
                    in_tail = true;
                    blocks.last_mut().expect("head consumed leading base letters").tail.0.push(b);
                }
            }
        }
        blocks
    }

    /// Number of `t`-letters, counted with multiplicity.
    pub fn stable_letter_count(&self) -> usize {
        self.letters.iter().filter(|l| l.is_stable()).count()
    }

    fn block_count(&self) -> usize {
        let mut count = 0;
        let mut prev_stable = false;
        for l in &self.letters {
            if l.is_stable() && !prev_stable {
                count += 1;
            }
            prev_stable = l.is_stable();
        }
        count
    }
}

impl fmt::Display for MixedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|l| write!(f, "{}", l.to_char()))
    }
}

impl Serialize for MixedWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for BaseWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for Alphabet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.generators().map(Generator::symbol).collect::<String>())
    }
}

fn free_reduce_iter<I: IntoIterator<Item = Letter>>(raw: I) -> MixedWord {
    let mut stack = Vec::new();
    for l in raw {
        push_reduced(&mut stack, l, Letter::inv);
    }
    MixedWord { letters: stack }
}

/// Freely reduces an arbitrary letter sequence into a [`MixedWord`].
pub fn free_reduce(raw: &[Letter]) -> MixedWord {
    free_reduce_iter(raw.iter().copied())
}

/// Cyclically reduced in the alternating-form sense: the word ends in a
/// `t`-letter (`gn = 1`) and, with more than one block, starts with a base
/// letter. Words without `t` count as cyclically reduced when they are
/// cyclically reduced in `G`.
pub fn is_cyclically_reduced(w: &MixedWord) -> bool {
    let letters = w.letters();
    let (Some(&first), Some(&last)) = (letters.first(), letters.last()) else {
        return true;
    };
    if w.stable_letter_count() == 0 {
        return letters.len() == 1 || first != last.inv();
    }
    last.is_stable() && (w.block_count() <= 1 || !first.is_stable())
}

/// Result of [`cyclic_reduce`]: `conjugator^-1 * reduced * conjugator` is the
/// original word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicReduction {
    pub reduced: MixedWord,
    pub conjugator: MixedWord,
}

/// Strips `x v x^-1` to the cyclically reduced core `v`; returns `(x, v)`.
fn strip_conjugation(w: &MixedWord) -> (MixedWord, MixedWord) {
    let letters = w.letters();
    let mut lo = 0;
    let mut hi = letters.len();
    while hi - lo >= 2 && letters[lo] == letters[hi - 1].inv() {
        lo += 1;
        hi -= 1;
    }
    (MixedWord { letters: letters[..lo].to_vec() }, MixedWord { letters: letters[lo..hi].to_vec() })
}

fn rotate(w: &MixedWord, k: usize) -> MixedWord {
    let mut letters = w.letters[k..].to_vec();
    letters.extend_from_slice(&w.letters[..k]);
    MixedWord { letters }
}

fn prefix(w: &MixedWord, k: usize) -> MixedWord {
    MixedWord { letters: w.letters[..k].to_vec() }
}

/// Conjugates `w` to a cyclically reduced word. Words that already are
/// cyclically reduced are returned unchanged with a trivial conjugator.
pub fn cyclic_reduce(w: &MixedWord) -> CyclicReduction {
    if is_cyclically_reduced(w) {
        return CyclicReduction { reduced: w.clone(), conjugator: MixedWord::identity() };
    }
    let (outer, core) = strip_conjugation(w);
    // w = outer * core * outer^-1, so core = outer^-1 w outer.
    let mut conjugator = outer.inverse();
    let mut reduced = core;
    if !is_cyclically_reduced(&reduced) {
        let k = (1..reduced.len())
            .find(|&k| is_cyclically_reduced(&rotate(&reduced, k)))
            .expect("a cyclically reduced core containing t has a rotation ending in t");
        // Rotating core = p s to s p conjugates by p.
        let p = prefix(&reduced, k);
        conjugator = p.inverse().mul(&conjugator);
        reduced = rotate(&reduced, k);
    }
    CyclicReduction { reduced, conjugator }
}

/// Canonical representative of the conjugacy class of `w`, together with a
/// conjugator `u` such that `u^-1 * canonical * u = w`.
pub fn conjugacy_canonical_with_conjugator(w: &MixedWord) -> (MixedWord, MixedWord) {
    let CyclicReduction { reduced, conjugator } = cyclic_reduce(w);
    if reduced.is_identity() {
        return (reduced, conjugator);
    }
    let best = (0..reduced.len())
        .map(|k| (rotate(&reduced, k), k))
        .filter(|(r, _)| is_cyclically_reduced(r))
        .min()
        .expect("the unrotated word qualifies");
    let p = prefix(&reduced, best.1);
    (best.0, p.inverse().mul(&conjugator))
}

/// The least rotation, in letter order, of the cyclic reduction of `w`.
/// Equal outputs characterise conjugacy in `G * <t>`.
pub fn conjugacy_canonical(w: &MixedWord) -> MixedWord {
    conjugacy_canonical_with_conjugator(w).0
}

/// `ex(w)`, the exponent sum of `t`.
pub fn exponent_sum(w: &MixedWord) -> i64 {
    w.letters().iter().map(|l| l.t_exponent()).sum()
}

pub fn t_shape(w: &MixedWord) -> TShape {
    TShape(w.blocks().iter().map(|b| b.exponent).collect())
}

/// `(g0, g1, ..., gn)`, including trivial end coefficients.
pub fn coefficients(w: &MixedWord) -> Vec<BaseWord> {
    std::iter::once(w.head()).chain(w.blocks().into_iter().map(|b| b.tail)).collect()
}

/// If `w` is conjugate to `g t^e` with `e = +-1`, returns `(g, e)`.
pub fn is_conjugate_to_gt(w: &MixedWord) -> Option<(BaseWord, Sign)> {
    let canonical = conjugacy_canonical(w);
    match t_shape(&canonical).exponents() {
        [1] => Some((canonical.head(), Sign::Plus)),
        [-1] => Some((canonical.head(), Sign::Minus)),
        _ => None,
    }
}
