use std::collections::BTreeSet;

use serde::Serialize;

use super::{validate_sphere, ComplexError, CornerRef, Face, RelatorSet, SphereComplex};
use crate::word_algebra::{cyclic_reduce, BaseLetter, BaseWord, Letter, MixedWord, Sign};

/// A cyclic word split into `(t-sign, following coefficient)` pairs, rotated
/// to start at a `t`-letter. Empty for words without `t`.
pub fn relator_syllables(w: &MixedWord) -> Vec<(Sign, BaseWord)> {
    let reduced = cyclic_reduce(w).reduced;
    let letters = reduced.letters();
    let Some(start) = letters.iter().rposition(|l| l.is_stable()) else {
        return Vec::new();
    };
    let mut out: Vec<(Sign, Vec<BaseLetter>)> = Vec::new();
    for &l in letters[start..].iter().chain(&letters[..start]) {
        match l {
            Letter::Stable { inverse } => out.push((if inverse { Sign::Minus } else { Sign::Plus }, Vec::new())),
            Letter::Base(b) => out.last_mut().expect("starts with t").1.push(b),
        }
    }
    out.into_iter().map(|(s, g)| (s, BaseWord::from_letters(g))).collect()
}

fn face_syllables(face: &Face) -> Option<Vec<(Sign, BaseWord)>> {
    face.boundary.iter().zip(&face.corners).map(|(s, c)| c.label.clone().map(|l| (s.dir.sign(), l))).collect()
}

fn is_rotation<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && (a.is_empty() || (0..b.len()).any(|k| b[k..].iter().chain(&b[..k]).eq(a.iter())))
}

struct RelatorTable {
    cycles: Vec<Vec<(Sign, BaseWord)>>,
    coefficients: BTreeSet<BaseWord>,
}

impl RelatorTable {
    fn new(relators: &RelatorSet) -> Self {
        let mut cycles = Vec::new();
        for r in relators.relators() {
            cycles.push(relator_syllables(&r));
            cycles.push(relator_syllables(&r.inverse()));
        }
        let coefficients = cycles.iter().flatten().map(|(_, g)| g.clone()).collect();
        RelatorTable { cycles, coefficients }
    }

    fn matches(&self, face: &Face) -> bool {
        face_syllables(face).is_some_and(|s| !s.is_empty() && self.cycles.iter().any(|c| is_rotation(&s, c)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub passed: bool,
    pub detail: Option<String>,
}

impl PropertyResult {
    fn check(problems: Vec<String>) -> Self {
        PropertyResult { passed: problems.is_empty(), detail: (!problems.is_empty()).then(|| problems.join("; ")) }
    }
}

/// Two faces sharing an edge whose readings from one end of that edge are
/// mutually inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Type1Witness {
    pub faces: (String, String),
    pub edge: String,
    pub steps: (usize, usize),
}

/// Consecutive 2-gons between vertices `a` and `b` whose corner labels at
/// `a` multiply to 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Type2Witness {
    pub a: String,
    pub b: String,
    pub faces: Vec<String>,
    pub trivial_at_a: bool,
    pub trivial_at_b: bool,
}

impl Type2Witness {
    pub fn discrepancy(&self) -> bool {
        self.trivial_at_a != self.trivial_at_b
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CslReport {
    pub a: PropertyResult,
    pub b: PropertyResult,
    pub c: PropertyResult,
    pub d: PropertyResult,
    pub e: PropertyResult,
    pub f: PropertyResult,
    pub g: PropertyResult,
    pub type1: Option<Type1Witness>,
    pub type2: Option<Type2Witness>,
}

impl CslReport {
    pub fn all_passed(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.d, &self.e, &self.f, &self.g].iter().all(|p| p.passed)
    }

    pub fn entries(&self) -> [(&'static str, &PropertyResult); 7] {
        [("a", &self.a), ("b", &self.b), ("c", &self.c), ("d", &self.d), ("e", &self.e), ("f", &self.f), ("g", &self.g)]
    }
}

/// Evaluates properties (a) through (g) of a labelled subdivision against
/// the relator set. The complex must be a valid sphere subdivision.
pub fn check_csl(complex: &SphereComplex, relators: &RelatorSet) -> Result<CslReport, ComplexError> {
    let report = validate_sphere(complex)?;
    if !report.passed() {
        return Err(ComplexError::Malformed(report.problems.join("; ")));
    }
    let index = complex.index()?;
    let table = RelatorTable::new(relators);
    let v0 = complex.distinguished.v0.as_str();
    let inf = index.face[&complex.distinguished.e_infinity];
    let inf_face = &complex.faces[inf];

    let a = PropertyResult::check(Vec::new());

    let mut problems = Vec::new();
    let unlabelled: Vec<CornerRef> = complex.corners().filter(|&c| complex.label(c).is_none()).collect();
    match unlabelled.as_slice() {
        [(f, c)] if *f == inf && inf_face.corners[*c].vertex == v0 => {}
        _ => problems.push(format!("expected one unlabelled corner on e_infinity at v0, found {}", unlabelled.len())),
    }
    for c in complex.corners() {
        if let Some(l) = complex.label(c) {
            if !table.coefficients.contains(l) {
                problems.push(format!("label '{l}' on face '{}' is not a relator coefficient", complex.faces[c.0].id));
            }
        }
    }
    let b = PropertyResult::check(problems);

    let mut problems = Vec::new();
    for v in complex.vertices.iter().filter(|v| *v != v0) {
        match super::read_vertex_word(complex, v) {
            Ok(word) if word.is_identity() => {}
            Ok(word) => problems.push(format!("vertex '{v}' reads {word}")),
            Err(e) => problems.push(format!("vertex '{v}': {e}")),
        }
    }
    let c = PropertyResult::check(problems);

    let mut problems = Vec::new();
    let single_loop =
        inf_face.len() == 1 && complex.edge(&inf_face.boundary[0].edge).is_some_and(|e| e.tail == v0 && e.head == v0);
    if !single_loop {
        problems.push("e_infinity is not bounded by a single loop at v0".to_string());
    }
    let d = PropertyResult::check(problems);

    let mut problems = Vec::new();
    for (fi, face) in complex.faces.iter().enumerate() {
        if fi != inf && !table.matches(face) {
            problems.push(format!("face '{}' does not read a relator", face.id));
        }
    }
    let e = PropertyResult::check(problems);

    let type1 = detect_type1(complex, relators)?;
    let type2 = detect_type2(complex, relators)?;
    let mut problems = Vec::new();
    if let Some(w) = &type1 {
        problems.push(format!("type (1) pair {} / {} across edge '{}'", w.faces.0, w.faces.1, w.edge));
    }
    if let Some(w) = &type2 {
        problems.push(format!("type (2) chain {:?} between '{}' and '{}'", w.faces, w.a, w.b));
    }
    let f = PropertyResult::check(problems);

    let mut problems = Vec::new();
    if complex.vertices.len() < 2 {
        problems.push("fewer than two vertices".to_string());
    }
    if complex.faces.len() < 3 {
        problems.push("fewer than three faces".to_string());
    }
    let inf_edges: BTreeSet<&str> = inf_face.boundary.iter().map(|s| s.edge.as_str()).collect();
    let has_e1 = complex.faces.iter().enumerate().any(|(fi, face)| {
        let edges: BTreeSet<&str> = face.boundary.iter().map(|s| s.edge.as_str()).collect();
        fi != inf && inf_edges.is_subset(&edges) && face.len() > inf_face.len()
    });
    if !has_e1 {
        problems.push("no face properly contains the boundary of e_infinity".to_string());
    }
    let g = PropertyResult::check(problems);

    Ok(CslReport { a, b, c, d, e, f, g, type1, type2 })
}

/// Finds two faces that cancel across a shared edge.
pub fn detect_type1(complex: &SphereComplex, relators: &RelatorSet) -> Result<Option<Type1Witness>, ComplexError> {
    let index = complex.index()?;
    let table = RelatorTable::new(relators);
    let inf = index.face.get(&complex.distinguished.e_infinity).copied();
    let eligible: Vec<bool> =
        complex.faces.iter().enumerate().map(|(fi, f)| Some(fi) != inf && table.matches(f)).collect();
    for (ei, occ) in index.occurrences.iter().enumerate() {
        for (x, &(f1, i1)) in occ.iter().enumerate() {
            for &(f2, i2) in &occ[x + 1..] {
                if f1 == f2 || !eligible[f1] || !eligible[f2] {
                    continue;
                }
                if mirrored(&complex.faces[f1], i1, &complex.faces[f2], i2) {
                    return Ok(Some(Type1Witness {
                        faces: (complex.faces[f1].id.clone(), complex.faces[f2].id.clone()),
                        edge: complex.edges[ei].id.clone(),
                        steps: (i1, i2),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Reading `f1` from the start of step `i1` gives the inverse of reading
/// `f2` from the end of step `i2`, the same vertex of the shared edge.
fn mirrored(f1: &Face, i1: usize, f2: &Face, i2: usize) -> bool {
    let n = f1.len();
    if f2.len() != n {
        return false;
    }
    (0..n).all(|j| {
        let s1 = &f1.boundary[(i1 + (n - j) % n) % n];
        let s2 = &f2.boundary[(i2 + j) % n];
        let l1 = f1.corners[(i1 + n - 1 - j) % n].label.as_ref();
        let l2 = f2.corners[(i2 + j) % n].label.as_ref();
        s2.dir == s1.dir.flip() && matches!((l1, l2), (Some(x), Some(y)) if *y == x.inverse())
    })
}

/// Finds the longest run of consecutive type II/II' 2-gons around a vertex
/// `a`, all with second vertex `b`, whose labels at `a` multiply to 1. The
/// product at `b` is recomputed and reported alongside.
pub fn detect_type2(complex: &SphereComplex, _relators: &RelatorSet) -> Result<Option<Type2Witness>, ComplexError> {
    let index = complex.index()?;
    if !validate_sphere(complex)?.edge_pairing {
        return Ok(None);
    }
    let mut best: Option<Type2Witness> = None;
    for a in &complex.vertices {
        let cycle = complex.vertex_corners(&index, a);
        let partner: Vec<Option<&str>> = cycle.iter().map(|&c| two_gon_partner(complex, c)).collect();
        let n = cycle.len();
        let whole = n > 0 && partner.iter().all(|p| p.is_some() && *p == partner[0]);
        let mut runs: Vec<(usize, usize)> = Vec::new();
        if whole {
            runs.push((0, n));
        } else {
            let mut i = 0;
            while i < n {
                if partner[i].is_none() {
                    i += 1;
                    continue;
                }
                let mut j = i + 1;
                while j < n && partner[j] == partner[i] {
                    j += 1;
                }
                runs.push((i, j - i));
                i = j;
            }
            // A run may wrap past the end of the cycle.
            if runs.len() >= 2 {
                let (first, last) = (runs[0], runs[runs.len() - 1]);
                if first.0 == 0 && last.0 + last.1 == n && partner[0] == partner[n - 1] {
                    runs.pop();
                    runs[0] = (last.0, last.1 + first.1);
                }
            }
        }
        for (start, len) in runs {
            let b = partner[start % n].expect("run members are 2-gons");
            for l in (1..=len).rev() {
                if best.as_ref().is_some_and(|w| w.faces.len() >= l) {
                    break;
                }
                let offsets = if whole && l == n { 1 } else { len - l + 1 };
                let found = (0..offsets).find_map(|o| {
                    let chain: Vec<CornerRef> = (0..l).map(|k| cycle[(start + o + k) % n]).collect();
                    let product = BaseWord::product(chain.iter().map(|&c| complex.label(c).expect("labelled")));
                    product.is_identity().then_some(chain)
                });
                if let Some(chain) = found {
                    let at_b: Vec<&BaseWord> = chain
                        .iter()
                        .rev()
                        .map(|&(f, c)| complex.faces[f].corners[1 - c].label.as_ref().expect("labelled"))
                        .collect();
                    best = Some(Type2Witness {
                        a: a.clone(),
                        b: b.to_string(),
                        faces: chain.iter().map(|&(f, _)| complex.faces[f].id.clone()).collect(),
                        trivial_at_a: true,
                        trivial_at_b: BaseWord::product(at_b).is_identity(),
                    });
                    break;
                }
            }
        }
    }
    Ok(best)
}

/// The far vertex of a labelled type II/II' 2-gon containing this corner.
fn two_gon_partner(complex: &SphereComplex, (f, c): CornerRef) -> Option<&str> {
    let face = &complex.faces[f];
    let typed = face.face_type.is_some_and(|t| t.is_two_gon_type());
    if !typed || face.len() != 2 || !face.is_fully_labelled() {
        return None;
    }
    let other = &face.corners[1 - c].vertex;
    (other != &face.corners[c].vertex).then_some(other.as_str())
}
