use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;

use super::schedule::{Piece, Schedules};
use super::{horizon_error, CrashError};
use crate::rational::{self, int, Rational};
use crate::sphere_complex::{Dir, SphereComplex};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Site {
    /// `coordinate` runs from 0 at the tail to 1 at the head.
    Edge {
        edge: String,
        #[serde(with = "rational")]
        coordinate: Rational,
    },
    Vertex {
        vertex: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrashEvent {
    #[serde(with = "rational")]
    pub time: Rational,
    pub site: Site,
    pub participants: Vec<String>,
    pub complete: bool,
}

/// A stretch of time during which a car is inside one edge, with its edge
/// coordinate at both ends.
struct EdgePass {
    t0: Rational,
    t1: Rational,
    u0: Rational,
    u1: Rational,
}

impl EdgePass {
    fn at(&self, t: &Rational) -> Rational {
        if self.t0 == self.t1 {
            return self.u0;
        }
        self.u0 + (self.u1 - self.u0) * (t - self.t0) / (self.t1 - self.t0)
    }
}

fn edge_passes(pieces: &[Piece], n: usize, step: usize, dir: Dir) -> Vec<EdgePass> {
    let n_r = int(n as i64);
    // Step `step` spans (step - 1, step) modulo n.
    let lo = int(step as i64 - 1);
    let to_u = |x: Rational, k: &Rational| {
        let frac = x - lo - k * n_r;
        if dir == Dir::With {
            frac
        } else {
            Rational::one() - frac
        }
    };
    let mut out = Vec::new();
    for p in pieces {
        let k_min = ((p.x0 - lo - n_r) / n_r).floor().to_integer() - 1;
        let k_max = ((p.x1 - lo) / n_r).ceil().to_integer() + 1;
        for k in k_min..=k_max {
            let k = Rational::from_integer(k);
            let (a, b) = (lo + k * n_r, lo + k * n_r + Rational::one());
            if p.x0 == p.x1 {
                if a < p.x0 && p.x0 < b {
                    out.push(EdgePass { t0: p.t0, t1: p.t1, u0: to_u(p.x0, &k), u1: to_u(p.x0, &k) });
                }
                continue;
            }
            let (xa, xb) = (p.x0.max(a), p.x1.min(b));
            if xa >= xb {
                continue;
            }
            out.push(EdgePass { t0: p.time_at(&xa), t1: p.time_at(&xb), u0: to_u(xa, &k), u1: to_u(xb, &k) });
        }
    }
    out
}

fn meeting(a: &EdgePass, b: &EdgePass) -> Option<(Rational, Rational)> {
    let (lo, hi) = (a.t0.max(b.t0), a.t1.min(b.t1));
    if lo > hi {
        return None;
    }
    let (da0, da1) = (a.at(&lo) - b.at(&lo), a.at(&hi) - b.at(&hi));
    let t = if da0.is_zero() {
        lo
    } else if da0 == da1 {
        return None;
    } else {
        lo + (hi - lo) * da0 / (da0 - da1)
    };
    if t < lo || t > hi {
        return None;
    }
    let u = a.at(&t);
    (u > Rational::zero() && u < Rational::one()).then_some((t, u))
}

/// Closed occupancy intervals of corner `c`, merged.
fn corner_occupancy(pieces: &[Piece], n: usize) -> BTreeMap<usize, Vec<(Rational, Rational)>> {
    let n_r = int(n as i64);
    let mut raw: BTreeMap<usize, Vec<(Rational, Rational)>> = BTreeMap::new();
    for p in pieces {
        if p.x0 == p.x1 {
            if p.x0.is_integer() {
                let c = rational::modulo(&p.x0, &n_r).to_integer() as usize;
                raw.entry(c).or_default().push((p.t0, p.t1));
            }
            continue;
        }
        let mut j = p.x0.ceil();
        while j <= p.x1 {
            let t = p.time_at(&j);
            let c = rational::modulo(&j, &n_r).to_integer() as usize;
            raw.entry(c).or_default().push((t, t));
            j += Rational::one();
        }
    }
    for intervals in raw.values_mut() {
        intervals.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::new();
        for (a, b) in intervals.drain(..) {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        *intervals = merged;
    }
    raw
}

fn check_schedules(complex: &SphereComplex, schedules: &Schedules) -> Result<(), CrashError> {
    for face in &complex.faces {
        let s = schedules.get(&face.id).ok_or_else(|| CrashError::MissingSchedule(face.id.clone()))?;
        if s.corners != face.len() {
            return Err(CrashError::CornerCount { face: face.id.clone(), expected: face.len(), found: s.corners });
        }
    }
    if let Some(extra) = schedules.keys().find(|id| complex.face(id).is_none()) {
        return Err(CrashError::UnknownFace(extra.clone()));
    }
    Ok(())
}

/// All meetings in `[0, horizon]`, sorted by time, site and participants.
///
/// Two cars on one edge always travel in opposite directions, so every
/// edge-interior meeting is complete. A vertex event is recorded whenever a
/// car arrives at a vertex where another car already is, or where it
/// completes the set of occupied corners; it is complete when every corner
/// at the vertex is occupied.
pub fn simulate(
    complex: &SphereComplex,
    schedules: &Schedules,
    horizon: &Rational,
) -> Result<Vec<CrashEvent>, CrashError> {
    check_schedules(complex, schedules)?;
    let index = complex.index()?;
    if *horizon <= Rational::zero() {
        return Ok(Vec::new());
    }
    let pieces: Vec<Vec<Piece>> = complex.faces.iter().map(|f| schedules[&f.id].pieces(horizon)).collect();
    let mut events = Vec::new();

    for (ei, occ) in index.occurrences.iter().enumerate() {
        let [(f1, s1), (f2, s2)] = occ[..] else { continue };
        if f1 == f2 {
            continue;
        }
        let (face1, face2) = (&complex.faces[f1], &complex.faces[f2]);
        let p1 = edge_passes(&pieces[f1], face1.len(), s1, face1.boundary[s1].dir);
        let p2 = edge_passes(&pieces[f2], face2.len(), s2, face2.boundary[s2].dir);
        let mut found = BTreeSet::new();
        for a in &p1 {
            for b in &p2 {
                if let Some(hit) = meeting(a, b) {
                    found.insert(hit);
                }
            }
        }
        let mut participants = vec![face1.id.clone(), face2.id.clone()];
        participants.sort();
        for (time, coordinate) in found {
            events.push(CrashEvent {
                time,
                site: Site::Edge { edge: complex.edges[ei].id.clone(), coordinate },
                participants: participants.clone(),
                complete: true,
            });
        }
    }

    let mut at_vertex: BTreeMap<&str, Vec<(usize, Vec<(Rational, Rational)>)>> = BTreeMap::new();
    for (fi, face) in complex.faces.iter().enumerate() {
        for (c, intervals) in corner_occupancy(&pieces[fi], face.len()) {
            at_vertex.entry(face.corners[c].vertex.as_str()).or_default().push((fi, intervals));
        }
    }
    let valency = complex.valency();
    for (vertex, corners) in at_vertex {
        let starts: BTreeSet<Rational> = corners.iter().flat_map(|(_, iv)| iv.iter().map(|(a, _)| *a)).collect();
        for t in starts {
            let present: BTreeSet<usize> =
                corners.iter().filter(|(_, iv)| iv.iter().any(|(a, b)| *a <= t && t <= *b)).map(|(f, _)| *f).collect();
            let occupied = corners.iter().filter(|(_, iv)| iv.iter().any(|(a, b)| *a <= t && t <= *b)).count();
            let complete = occupied == valency[vertex];
            if present.len() >= 2 || complete {
                let mut participants: Vec<String> = present.iter().map(|&f| complex.faces[f].id.clone()).collect();
                participants.sort();
                events.push(CrashEvent {
                    time: t,
                    site: Site::Vertex { vertex: vertex.to_string() },
                    participants,
                    complete,
                });
            }
        }
    }

    events.sort_by(|a, b| (&a.time, &a.site, &a.participants).cmp(&(&b.time, &b.site, &b.participants)));
    Ok(events)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrashCheck {
    pub at_least_two: bool,
    #[serde(with = "rational")]
    pub common_period: Rational,
    pub complete_in_period: usize,
    pub complete_in_horizon: usize,
    pub events: Vec<CrashEvent>,
}

pub fn common_period(schedules: &Schedules) -> Rational {
    schedules.values().map(|s| s.period).reduce(|a, b| rational::lcm(&a, &b)).unwrap_or_else(Rational::one)
}

/// Simulates over `horizon` (at least twice the common period) and checks
/// that at least two complete crashes happen within one common period.
pub fn verify_at_least_two_crashes(
    complex: &SphereComplex,
    schedules: &Schedules,
    horizon: &Rational,
) -> Result<CrashCheck, CrashError> {
    let period = common_period(schedules);
    let required = period * int(2);
    if *horizon < required {
        return Err(horizon_error(horizon, &required));
    }
    let events = simulate(complex, schedules, horizon)?;
    let complete_in_period = events.iter().filter(|e| e.complete && e.time < period).count();
    let complete_in_horizon = events.iter().filter(|e| e.complete).count();
    Ok(CrashCheck {
        at_least_two: complete_in_period >= 2,
        common_period: period,
        complete_in_period,
        complete_in_horizon,
        events,
    })
}
