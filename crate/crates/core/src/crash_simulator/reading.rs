use serde::Serialize;

use super::simulate::{CrashEvent, Site};
use super::CrashError;
use crate::sphere_complex::{CornerRef, FaceType, SphereComplex};
use crate::word_algebra::BaseWord;

/// Corners of 2-gon faces carry elements of the subgroup `H`; all other
/// corners carry coefficients of a relator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerKind {
    Coefficient,
    Subgroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ReadingClass {
    /// Two cyclically adjacent coefficient corners with mutually inverse labels.
    Type1Witness { positions: [usize; 2] },
    /// A run of consecutive subgroup corners whose labels multiply to 1.
    Type2Witness { start: usize, len: usize },
    /// Neither reduction applies, so the reading is a relation that free
    /// relative position forbids.
    FreenessViolation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReadingCorner {
    pub face: String,
    pub index: usize,
    pub kind: CornerKind,
    pub label: BaseWord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexReading {
    pub vertex: String,
    pub corners: Vec<ReadingCorner>,
    pub word: BaseWord,
    pub class: ReadingClass,
}

fn kind_of(face_type: Option<FaceType>) -> CornerKind {
    match face_type {
        Some(t) if t.is_two_gon_type() => CornerKind::Subgroup,
        _ => CornerKind::Coefficient,
    }
}

/// Reads the clockwise corner labels at the vertex of a complete vertex
/// crash and classifies them.
pub fn crash_vertex_reading(complex: &SphereComplex, event: &CrashEvent) -> Result<VertexReading, CrashError> {
    let Site::Vertex { vertex } = &event.site else { return Err(CrashError::NotCompleteVertexEvent) };
    if !event.complete {
        return Err(CrashError::NotCompleteVertexEvent);
    }
    let index = complex.index()?;
    let cycle: Vec<CornerRef> = complex.vertex_corners(&index, vertex);
    let mut corners = Vec::with_capacity(cycle.len());
    for (f, c) in cycle {
        let face = &complex.faces[f];
        let label = face.corners[c]
            .label
            .clone()
            .ok_or_else(|| CrashError::UnlabelledCorner { face: face.id.clone(), index: c })?;
        corners.push(ReadingCorner { face: face.id.clone(), index: c, kind: kind_of(face.face_type), label });
    }
    let word = BaseWord::product(corners.iter().map(|c| &c.label));
    let class = classify(&corners);
    Ok(VertexReading { vertex: vertex.clone(), corners, word, class })
}

fn classify(corners: &[ReadingCorner]) -> ReadingClass {
    let n = corners.len();
    if n >= 2 {
        for i in 0..n {
            let j = (i + 1) % n;
            let (x, y) = (&corners[i], &corners[j]);
            if x.kind == CornerKind::Coefficient
                && y.kind == CornerKind::Coefficient
                && !x.label.is_identity()
                && x.label.mul(&y.label).is_identity()
            {
                return ReadingClass::Type1Witness { positions: [i, j] };
            }
        }
    }
    let subgroup: Vec<bool> = corners.iter().map(|c| c.kind == CornerKind::Subgroup).collect();
    // Shortest trivial run of subgroup corners, scanning every start.
    let mut best: Option<(usize, usize)> = None;
    for start in 0..n {
        if !subgroup[start] {
            continue;
        }
        let mut product = BaseWord::identity();
        for len in 1..=n {
            let k = (start + len - 1) % n;
            if !subgroup[k] {
                break;
            }
            product = product.mul(&corners[k].label);
            if product.is_identity() {
                if best.is_none_or(|(_, l)| len < l) {
                    best = Some((start, len));
                }
                break;
            }
        }
    }
    match best {
        Some((start, len)) => ReadingClass::Type2Witness { start, len },
        None => ReadingClass::FreenessViolation,
    }
}
