//! Oriented cell subdivisions of the 2-sphere with group-labelled corners.
//!
//! Conventions: every face lists its boundary anticlockwise as edge steps,
//! and `corners[i]` is the corner at the vertex where step `i` arrives. A
//! step with direction `+` traverses its edge from tail to head and reads
//! `t`; direction `-` reads `t^-1`.

mod csl;
mod file;
mod generate;
mod validate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::word_algebra::{Alphabet, BaseWord, Generator, Letter, MixedWord, Sign, WordError};

pub use csl::{
    check_csl, detect_type1, detect_type2, relator_syllables, CslReport, PropertyResult, Type1Witness, Type2Witness,
};
pub use file::{load_complex, parse_complex, save_complex, to_json};
pub use generate::generate_random;
pub use validate::{validate_sphere, ValidationReport};

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("unknown edge '{0}'")]
    UnknownEdge(String),
    #[error("unknown face '{0}'")]
    UnknownFace(String),
    #[error("duplicate identifier '{0}'")]
    DuplicateId(String),
    #[error("face '{face}' has {corners} corners but {steps} boundary steps")]
    CornerCount { face: String, corners: usize, steps: usize },
    #[error("corner {index} of face '{face}' is unlabelled")]
    UnlabelledCorner { face: String, index: usize },
    #[error("the vertex word at v0 is undefined")]
    VertexIsV0,
    #[error("edge structure is inconsistent: {0}")]
    Malformed(String),
    #[error("invalid label: {0}")]
    Label(#[from] WordError),
    #[error("invalid complex document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    #[serde(rename = "+")]
    With,
    #[serde(rename = "-")]
    Against,
}

impl Dir {
    pub fn sign(self) -> Sign {
        match self {
            Dir::With => Sign::Plus,
            Dir::Against => Sign::Minus,
        }
    }

    pub fn flip(self) -> Dir {
        match self {
            Dir::With => Dir::Against,
            Dir::Against => Dir::With,
        }
    }

    pub fn letter(self) -> Letter {
        Letter::stable(self.sign())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaceType {
    I,
    #[serde(rename = "I'")]
    IPrime,
    II,
    #[serde(rename = "II'")]
    IIPrime,
    #[serde(rename = "infinity")]
    Infinity,
}

impl FaceType {
    pub fn is_two_gon_type(self) -> bool {
        matches!(self, FaceType::II | FaceType::IIPrime)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub edge: String,
    pub dir: Dir,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corner {
    pub vertex: String,
    #[serde(with = "file::label_serde")]
    pub label: Option<BaseWord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Face {
    pub id: String,
    #[serde(rename = "type", default)]
    pub face_type: Option<FaceType>,
    pub boundary: Vec<Step>,
    pub corners: Vec<Corner>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn is_fully_labelled(&self) -> bool {
        self.corners.iter().all(|c| c.label.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Distinguished {
    pub e_infinity: String,
    pub v0: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereComplex {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    pub distinguished: Distinguished,
}

/// A corner as `(face index, corner index)`.
pub type CornerRef = (usize, usize);

/// Index tables over a complex whose identifiers all resolve.
#[derive(Debug, Clone)]
pub struct ComplexIndex {
    pub vertex: HashMap<String, usize>,
    pub edge: HashMap<String, usize>,
    pub face: HashMap<String, usize>,
    /// For each edge, the `(face, step)` positions where it occurs.
    pub occurrences: Vec<Vec<(usize, usize)>>,
}

impl SphereComplex {
    /// Resolves all identifiers, failing on unknown or duplicate ids.
    pub fn index(&self) -> Result<ComplexIndex, ComplexError> {
        fn table<'a>(ids: impl Iterator<Item = &'a String>) -> Result<HashMap<String, usize>, ComplexError> {
            let mut map = HashMap::new();
            for (i, id) in ids.enumerate() {
                if map.insert(id.clone(), i).is_some() {
                    return Err(ComplexError::DuplicateId(id.clone()));
                }
            }
            Ok(map)
        }
        let vertex = table(self.vertices.iter())?;
        let edge = table(self.edges.iter().map(|e| &e.id))?;
        let face = table(self.faces.iter().map(|f| &f.id))?;
        for e in &self.edges {
            for v in [&e.tail, &e.head] {
                if !vertex.contains_key(v) {
                    return Err(ComplexError::UnknownVertex(v.clone()));
                }
            }
        }
        let mut occurrences = vec![Vec::new(); self.edges.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            if f.corners.len() != f.boundary.len() {
                return Err(ComplexError::CornerCount {
                    face: f.id.clone(),
                    corners: f.corners.len(),
                    steps: f.boundary.len(),
                });
            }
            for (si, s) in f.boundary.iter().enumerate() {
                let e = *edge.get(&s.edge).ok_or_else(|| ComplexError::UnknownEdge(s.edge.clone()))?;
                occurrences[e].push((fi, si));
            }
            for c in &f.corners {
                if !vertex.contains_key(&c.vertex) {
                    return Err(ComplexError::UnknownVertex(c.vertex.clone()));
                }
            }
        }
        if !face.contains_key(&self.distinguished.e_infinity) {
            return Err(ComplexError::UnknownFace(self.distinguished.e_infinity.clone()));
        }
        if !vertex.contains_key(&self.distinguished.v0) {
            return Err(ComplexError::UnknownVertex(self.distinguished.v0.clone()));
        }
        Ok(ComplexIndex { vertex, edge, face, occurrences })
    }

    pub fn face(&self, id: &str) -> Option<&Face> {
        self.faces.iter().find(|f| f.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn face_index(&self, id: &str) -> Option<usize> {
        self.faces.iter().position(|f| f.id == id)
    }

    /// Vertex where a step starts and where it arrives.
    pub fn step_ends(&self, step: &Step) -> Option<(&str, &str)> {
        let e = self.edge(&step.edge)?;
        Some(match step.dir {
            Dir::With => (e.tail.as_str(), e.head.as_str()),
            Dir::Against => (e.head.as_str(), e.tail.as_str()),
        })
    }

    /// Next corner clockwise around the vertex of `corner`: cross the step
    /// leaving that corner into the face that traverses it the other way.
    /// Requires a valid edge pairing.
    pub fn clockwise_next(&self, index: &ComplexIndex, corner: CornerRef) -> Option<CornerRef> {
        let (fi, ci) = corner;
        let face = &self.faces[fi];
        let out = (ci + 1) % face.len();
        let e = index.edge[&face.boundary[out].edge];
        index.occurrences[e]
            .iter()
            .copied()
            .find(|&(f2, s2)| (f2, s2) != (fi, out) && self.faces[f2].boundary[s2].dir != face.boundary[out].dir)
    }

    /// Corners at `vertex` in clockwise order, starting from the first corner
    /// in face order. Requires a valid edge pairing.
    pub fn vertex_corners(&self, index: &ComplexIndex, vertex: &str) -> Vec<CornerRef> {
        let Some(start) = self.corners().find(|&(f, c)| self.faces[f].corners[c].vertex == vertex) else {
            return Vec::new();
        };
        let mut cycle = vec![start];
        let mut cur = start;
        while let Some(next) = self.clockwise_next(index, cur) {
            if next == start || cycle.len() > self.corner_count() {
                break;
            }
            cycle.push(next);
            cur = next;
        }
        cycle
    }

    pub fn corners(&self) -> impl Iterator<Item = CornerRef> + '_ {
        self.faces.iter().enumerate().flat_map(|(fi, f)| (0..f.corners.len()).map(move |ci| (fi, ci)))
    }

    pub fn corner_count(&self) -> usize {
        self.faces.iter().map(|f| f.corners.len()).sum()
    }

    pub fn label(&self, corner: CornerRef) -> Option<&BaseWord> {
        self.faces[corner.0].corners[corner.1].label.as_ref()
    }

    /// Number of corners at each vertex.
    pub fn valency(&self) -> BTreeMap<&str, usize> {
        let mut out: BTreeMap<&str, usize> = self.vertices.iter().map(|v| (v.as_str(), 0)).collect();
        for f in &self.faces {
            for c in &f.corners {
                *out.entry(c.vertex.as_str()).or_default() += 1;
            }
        }
        out
    }
}

/// Reads a face anticlockwise from corner `start`: the `t`-letter of the step
/// arriving at each corner followed by the corner's label.
pub fn read_face_word(complex: &SphereComplex, face: &str, start: usize) -> Result<MixedWord, ComplexError> {
    let f = complex.face(face).ok_or_else(|| ComplexError::UnknownFace(face.to_string()))?;
    if f.corners.len() != f.boundary.len() {
        return Err(ComplexError::CornerCount {
            face: f.id.clone(),
            corners: f.corners.len(),
            steps: f.boundary.len(),
        });
    }
    let n = f.len();
    let mut raw = Vec::new();
    for j in 0..n {
        let k = (start + j) % n.max(1);
        raw.push(f.boundary[k].dir.letter());
        let label = f.corners[k]
            .label
            .as_ref()
            .ok_or_else(|| ComplexError::UnlabelledCorner { face: f.id.clone(), index: k })?;
        raw.extend(label.to_mixed().letters().iter().copied());
    }
    Ok(MixedWord::from_letters(raw))
}

/// Clockwise product of the corner labels at `vertex`.
pub fn read_vertex_word(complex: &SphereComplex, vertex: &str) -> Result<BaseWord, ComplexError> {
    if vertex == complex.distinguished.v0 {
        return Err(ComplexError::VertexIsV0);
    }
    let index = complex.index()?;
    if !index.vertex.contains_key(vertex) {
        return Err(ComplexError::UnknownVertex(vertex.to_string()));
    }
    let corners = complex.vertex_corners(&index, vertex);
    let mut labels = Vec::new();
    for c in corners {
        let label = complex
            .label(c)
            .ok_or_else(|| ComplexError::UnlabelledCorner { face: complex.faces[c.0].id.clone(), index: c.1 })?;
        labels.push(label.clone());
    }
    Ok(BaseWord::product(labels.iter()))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelatorError {
    #[error("generator '{0}' has no image under phi")]
    MissingImage(char),
}

/// `W = {w0} ∪ {t^-1 h t (h^phi)^-1}` over a free base group, with `phi`
/// given on generators and extended multiplicatively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorSet {
    pub w0: MixedWord,
    pub phi_images: BTreeMap<Generator, BaseWord>,
    pub h_pairs: Vec<(BaseWord, BaseWord)>,
    pub m: u32,
}

impl RelatorSet {
    pub fn new(w0: MixedWord) -> Self {
        RelatorSet { w0, phi_images: BTreeMap::new(), h_pairs: Vec::new(), m: 1 }
    }

    pub fn with_phi(
        w0: MixedWord,
        phi_images: BTreeMap<Generator, BaseWord>,
        hs: &[BaseWord],
        m: u32,
    ) -> Result<Self, RelatorError> {
        let mut set = RelatorSet { w0, phi_images, h_pairs: Vec::new(), m };
        for h in hs {
            let image = set.apply_phi(h)?;
            set.h_pairs.push((h.clone(), image));
        }
        Ok(set)
    }

    pub fn apply_phi(&self, h: &BaseWord) -> Result<BaseWord, RelatorError> {
        let mut parts = Vec::new();
        for l in h.letters() {
            let image = self.phi_images.get(&l.generator).ok_or(RelatorError::MissingImage(l.generator.symbol()))?;
            parts.push(if l.inverse { image.inverse() } else { image.clone() });
        }
        Ok(BaseWord::product(parts.iter()))
    }

    pub fn relators(&self) -> Vec<MixedWord> {
        let mut out = vec![self.w0.clone()];
        for (h, h_phi) in &self.h_pairs {
            out.push(MixedWord::product([
                &MixedWord::t_power(-1),
                &h.to_mixed(),
                &MixedWord::t(),
                &h_phi.inverse().to_mixed(),
            ]));
        }
        out
    }

    pub fn alphabet(&self) -> Alphabet {
        let mut symbols = String::new();
        let mut seen = std::collections::BTreeSet::new();
        for r in self.relators() {
            for l in r.letters() {
                if let Letter::Base(b) = l {
                    seen.insert(b.generator.symbol());
                }
            }
        }
        symbols.extend(seen);
        Alphabet::from_symbols(&symbols).expect("symbols come from generators")
    }
}

impl fmt::Display for SphereComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V={} E={} F={}", self.vertices.len(), self.edges.len(), self.faces.len())
    }
}

/// Incremental construction with corner vertices derived from the steps.
#[derive(Debug, Clone, Default)]
pub struct ComplexBuilder {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    faces: Vec<(String, Option<FaceType>, Vec<(String, Dir, Option<String>)>)>,
}

impl ComplexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(mut self, id: &str) -> Self {
        self.vertices.push(id.to_string());
        self
    }

    pub fn edge(mut self, id: &str, tail: &str, head: &str) -> Self {
        self.edges.push(Edge { id: id.into(), tail: tail.into(), head: head.into() });
        self
    }

    /// Steps are `(edge, '+' or '-', label)`.
    pub fn face(mut self, id: &str, face_type: Option<FaceType>, steps: &[(&str, char, Option<&str>)]) -> Self {
        let steps = steps
            .iter()
            .map(|&(e, d, l)| (e.to_string(), if d == '+' { Dir::With } else { Dir::Against }, l.map(str::to_string)))
            .collect();
        self.faces.push((id.to_string(), face_type, steps));
        self
    }

    pub fn build(self, e_infinity: &str, v0: &str) -> Result<SphereComplex, ComplexError> {
        let alphabet = file::label_alphabet();
        let mut faces = Vec::new();
        for (id, face_type, steps) in self.faces {
            let mut boundary = Vec::new();
            let mut corners = Vec::new();
            for (edge, dir, label) in steps {
                let e =
                    self.edges.iter().find(|e| e.id == edge).ok_or_else(|| ComplexError::UnknownEdge(edge.clone()))?;
                let vertex = if dir == Dir::With { e.head.clone() } else { e.tail.clone() };
                let label = label.map(|l| BaseWord::parse(&l, &alphabet)).transpose()?;
                boundary.push(Step { edge, dir });
                corners.push(Corner { vertex, label });
            }
            faces.push(Face { id, face_type, boundary, corners });
        }
        let complex = SphereComplex {
            vertices: self.vertices,
            edges: self.edges,
            faces,
            distinguished: Distinguished { e_infinity: e_infinity.into(), v0: v0.into() },
        };
        complex.index()?;
        Ok(complex)
    }
}
