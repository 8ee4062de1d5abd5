//! Surjectivity of `q: G -> G*<t>/<<w>>` for free `G`: verdicts with
//! checkable evidence, bounded normal-closure search and permutation
//! quotient certificates.

mod perm;
mod search;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::word_algebra::{
    cyclic_reduce, exponent_sum, free_reduce, is_conjugate_to_gt, Alphabet, BaseWord, Letter, MixedWord, Sign, TShape,
};

pub use perm::{
    order_evidence, quotient_certificate, verify_certificate, DegreeOrder, OrderEvidence, Permutation,
    QuotientCertificate, MAX_DEGREE,
};
pub use search::{normal_closure_search, ClosureWitness, ConjugateFactor, SearchBounds};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalyzeError {
    #[error("the relator is trivial")]
    TrivialWord,
    #[error("generator '{0}' is outside the base alphabet")]
    OutsideAlphabet(char),
    #[error("the relator is not conjugate to g t or g t^-1")]
    NotGtForm,
    #[error("t-shape {0} is neither (n) nor (1, ..., 1)")]
    ShapePrecondition(String),
    #[error("max degree {0} exceeds {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("search bounds must be at least 1")]
    ZeroBound,
}

/// `G * <t>` modulo relators, with `G` free on `generators`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub generators: Alphabet,
    pub relators: Vec<MixedWord>,
}

impl Presentation {
    /// The one-relator extension by `w`, stored cyclically reduced.
    pub fn one_relator(generators: Alphabet, w: &MixedWord) -> Result<Self, AnalyzeError> {
        check_alphabet(&generators, w)?;
        let reduced = cyclic_reduce(w).reduced;
        if reduced.is_identity() {
            return Err(AnalyzeError::TrivialWord);
        }
        Ok(Presentation { generators, relators: vec![reduced] })
    }

    /// Base generators followed by the stable letter.
    pub fn symbols(&self) -> Vec<char> {
        self.generators.generators().map(|g| g.symbol()).chain(['t']).collect()
    }
}

fn check_alphabet(alphabet: &Alphabet, w: &MixedWord) -> Result<(), AnalyzeError> {
    for l in w.letters() {
        if let Letter::Base(b) = l {
            if !alphabet.contains(b.generator) {
                return Err(AnalyzeError::OutsideAlphabet(b.generator.symbol()));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Surjective,
    NotSurjective,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Reason {
    GtCollapse,
    ExponentSum,
    MainTheorem,
    QuotientCertificate,
}

/// Corroborating bounded computations attached to a theorem-based verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Corroboration {
    pub bounds: SearchBounds,
    pub search_witness: Option<ClosureWitness>,
    pub max_degree: usize,
    pub certificate: Option<QuotientCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Collapse(Collapse),
    ExponentSum {
        exponent_sum: i64,
    },
    /// Emitted on the authority of the theorem for torsion-free `G`.
    Theorem {
        exponent_sum: i64,
        corroboration: Option<Corroboration>,
    },
    Certificate {
        certificate: Option<QuotientCertificate>,
        max_degree: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurjectivityVerdict {
    pub status: Status,
    pub reason: Reason,
    pub evidence: Evidence,
}

/// Verdict for the extension of the free group of rank `rank` by `w`.
pub fn analyze(w: &MixedWord, rank: usize) -> Result<SurjectivityVerdict, AnalyzeError> {
    analyze_in(w, &rank_alphabet(rank)?)
}

fn rank_alphabet(rank: usize) -> Result<Alphabet, AnalyzeError> {
    Alphabet::of_rank(rank).map_err(|_| AnalyzeError::DegreeTooLarge(rank))
}

pub fn analyze_in(w: &MixedWord, alphabet: &Alphabet) -> Result<SurjectivityVerdict, AnalyzeError> {
    check_alphabet(alphabet, w)?;
    if w.is_identity() {
        return Err(AnalyzeError::TrivialWord);
    }
    let ex = exponent_sum(w);
    if ex.abs() != 1 {
        return Ok(SurjectivityVerdict {
            status: Status::NotSurjective,
            reason: Reason::ExponentSum,
            evidence: Evidence::ExponentSum { exponent_sum: ex },
        });
    }
    if is_conjugate_to_gt(w).is_some() {
        let collapse = collapse_isomorphism(w)?;
        return Ok(SurjectivityVerdict {
            status: Status::Surjective,
            reason: Reason::GtCollapse,
            evidence: Evidence::Collapse(collapse),
        });
    }
    Ok(SurjectivityVerdict {
        status: Status::NotSurjective,
        reason: Reason::MainTheorem,
        evidence: Evidence::Theorem { exponent_sum: ex, corroboration: None },
    })
}

/// [`analyze_in`], with a bounded search for a `(+1)`-shaped element of the
/// normal closure and a quotient certificate attached to theorem-based
/// verdicts.
pub fn analyze_corroborated(
    w: &MixedWord,
    alphabet: &Alphabet,
    bounds: SearchBounds,
    max_degree: usize,
) -> Result<SurjectivityVerdict, AnalyzeError> {
    let mut verdict = analyze_in(w, alphabet)?;
    if let Evidence::Theorem { corroboration, .. } = &mut verdict.evidence {
        let target = TShape(vec![1]);
        let search_witness = normal_closure_search(w, alphabet, &target, bounds)?;
        let pres = Presentation::one_relator(alphabet.clone(), w)?;
        let certificate = quotient_certificate(&pres, max_degree)?;
        *corroboration = Some(Corroboration { bounds, search_witness, max_degree, certificate });
    }
    Ok(verdict)
}

/// Certificate-based verdict: `NotSurjective` when a finite quotient shows
/// the image of `G` is proper, `Undetermined` otherwise.
pub fn certificate_verdict(pres: &Presentation, max_degree: usize) -> Result<SurjectivityVerdict, AnalyzeError> {
    let certificate = quotient_certificate(pres, max_degree)?;
    let status = if certificate.is_some() { Status::NotSurjective } else { Status::Undetermined };
    Ok(SurjectivityVerdict {
        status,
        reason: Reason::QuotientCertificate,
        evidence: Evidence::Certificate { certificate, max_degree },
    })
}

/// Tietze elimination of `t` for a relator conjugate to `g t^e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Collapse {
    pub coefficient: BaseWord,
    pub sign: Sign,
    /// Image of `t` in `G`, namely `g^-e`.
    pub t_image: BaseWord,
    pub verified: bool,
}

/// Replaces every `t` in `w` by `t_image` and reduces in `G`.
pub fn substitute_t(w: &MixedWord, t_image: &BaseWord) -> BaseWord {
    let image = t_image.to_mixed();
    let inverse = image.inverse();
    let mut raw = Vec::new();
    for &l in w.letters() {
        match l {
            Letter::Base(_) => raw.push(l),
            Letter::Stable { inverse: false } => raw.extend_from_slice(image.letters()),
            Letter::Stable { inverse: true } => raw.extend_from_slice(inverse.letters()),
        }
    }
    free_reduce(&raw).as_base().expect("no stable letters remain")
}

pub fn collapse_isomorphism(w: &MixedWord) -> Result<Collapse, AnalyzeError> {
    let (coefficient, sign) = is_conjugate_to_gt(w).ok_or(AnalyzeError::NotGtForm)?;
    let t_image = match sign {
        Sign::Plus => coefficient.inverse(),
        Sign::Minus => coefficient.clone(),
    };
    let verified = substitute_t(w, &t_image).is_identity();
    Ok(Collapse { coefficient, sign, t_image, verified })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeSource {
    Builtin,
    Registry,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Amenability {
    pub amenable: bool,
    pub source: ShapeSource,
}

/// User-recorded amenability of t-shapes outside the built-in family.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShapeRegistry(BTreeMap<Vec<i64>, bool>);

impl ShapeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, shape: TShape, amenable: bool) {
        self.0.insert(shape.0, amenable);
    }

    pub fn get(&self, shape: &TShape) -> Option<bool> {
        self.0.get(&shape.0).copied()
    }
}

/// Built-in amenable shapes, up to cyclic rotation: `(+-1)` and
/// `(-1, +1, ..., -1, +1, +1)` with at least one `(-1, +1)` pair.
fn builtin_amenable(exponents: &[i64]) -> bool {
    let n = exponents.len();
    if n == 1 {
        return exponents[0].abs() == 1;
    }
    if n < 3 || n.is_multiple_of(2) {
        return false;
    }
    (0..n).any(|k| {
        let rotated: Vec<i64> = exponents[k..].iter().chain(&exponents[..k]).copied().collect();
        rotated[n - 1] == 1 && rotated[..n - 1].chunks(2).all(|p| p == [-1, 1])
    })
}

pub fn amenable_shape(shape: &TShape, registry: &ShapeRegistry) -> Amenability {
    if builtin_amenable(shape.exponents()) {
        return Amenability { amenable: true, source: ShapeSource::Builtin };
    }
    match registry.get(shape) {
        Some(amenable) => Amenability { amenable, source: ShapeSource::Registry },
        None => Amenability { amenable: false, source: ShapeSource::Unknown },
    }
}
