use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::CrashError;
use crate::rational::{self, int, Rational};
use crate::sphere_complex::{Dir, Face, FaceType, SphereComplex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Breakpoint {
    #[serde(with = "rational")]
    pub time: Rational,
    #[serde(with = "rational")]
    pub position: Rational,
}

/// A maximal interval on which the car does not move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stop {
    #[serde(with = "rational")]
    pub position: Rational,
    #[serde(with = "rational")]
    pub from: Rational,
    #[serde(with = "rational")]
    pub to: Rational,
}

/// Periodic position function. Breakpoint times lie in `[0, period)` and
/// increase strictly; positions are unwrapped and nondecreasing; after one
/// period the position has advanced by exactly `corners`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowSchedule {
    pub face: String,
    pub corners: usize,
    #[serde(with = "rational")]
    pub period: Rational,
    pub breakpoints: Vec<Breakpoint>,
}

/// One linear stretch of a trajectory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Piece {
    pub t0: Rational,
    pub t1: Rational,
    pub x0: Rational,
    pub x1: Rational,
}

impl Piece {
    pub fn position_at(&self, t: &Rational) -> Rational {
        if self.t1 == self.t0 {
            return self.x0;
        }
        self.x0 + (self.x1 - self.x0) * (t - self.t0) / (self.t1 - self.t0)
    }

    pub fn time_at(&self, x: &Rational) -> Rational {
        self.t0 + (self.t1 - self.t0) * (x - self.x0) / (self.x1 - self.x0)
    }
}

pub type Schedules = BTreeMap<String, FlowSchedule>;

impl FlowSchedule {
    pub fn new(
        face: &str,
        corners: usize,
        period: Rational,
        mut breakpoints: Vec<Breakpoint>,
    ) -> Result<Self, CrashError> {
        let invalid = |reason: &str| CrashError::InvalidSchedule { face: face.to_string(), reason: reason.to_string() };
        if period <= Rational::zero() {
            return Err(invalid("period must be positive"));
        }
        if corners == 0 || breakpoints.is_empty() {
            return Err(invalid("empty face or schedule"));
        }
        for b in &mut breakpoints {
            let wrapped = rational::modulo(&b.time, &period);
            let laps = ((b.time - wrapped) / period).to_integer();
            b.time = wrapped;
            b.position -= int(corners as i64) * Rational::from_integer(laps);
        }
        breakpoints.sort_by_key(|a| a.time);
        let schedule = FlowSchedule { face: face.to_string(), corners, period, breakpoints };
        schedule.check().map_err(|r| invalid(&r))?;
        Ok(schedule)
    }

    fn check(&self) -> Result<(), String> {
        let closed = self.closing_breakpoint();
        let all: Vec<&Breakpoint> = self.breakpoints.iter().chain(std::iter::once(&closed)).collect();
        for w in all.windows(2) {
            if w[1].time <= w[0].time {
                return Err("breakpoint times must increase strictly".into());
            }
            if w[1].position < w[0].position {
                return Err("position must be nondecreasing".into());
            }
        }
        Ok(())
    }

    /// The first breakpoint one period later.
    fn closing_breakpoint(&self) -> Breakpoint {
        let first = &self.breakpoints[0];
        Breakpoint { time: first.time + self.period, position: first.position + self.n() }
    }

    fn n(&self) -> Rational {
        int(self.corners as i64)
    }

    /// Linear pieces covering `[0, horizon]`.
    pub(crate) fn pieces(&self, horizon: &Rational) -> Vec<Piece> {
        let m = self.breakpoints.len();
        let mut out = Vec::new();
        let last_lap = (horizon / self.period).floor().to_integer() + 1;
        for lap in -1..=last_lap {
            let dt = self.period * Rational::from_integer(lap);
            let dx = self.n() * Rational::from_integer(lap);
            for i in 0..m {
                let a = &self.breakpoints[i];
                let b = if i + 1 < m { self.breakpoints[i + 1].clone() } else { self.closing_breakpoint() };
                let (t0, t1) = (a.time + dt, b.time + dt);
                if t1 <= Rational::zero() || t0 > *horizon {
                    continue;
                }
                let piece = Piece { t0, t1, x0: a.position + dx, x1: b.position + dx };
                let (c0, c1) = (t0.max(Rational::zero()), t1.min(*horizon));
                out.push(Piece { x0: piece.position_at(&c0), x1: piece.position_at(&c1), t0: c0, t1: c1 });
            }
        }
        out
    }

    /// Unwrapped position at time `t >= 0`.
    pub fn position(&self, t: &Rational) -> Rational {
        let laps = (t / self.period).floor();
        let local = t - laps * self.period;
        let shift = laps * self.n();
        self.pieces(&self.period)
            .into_iter()
            .find(|p| p.t0 <= local && local <= p.t1)
            .map(|p| p.position_at(&local) + shift)
            .expect("pieces cover one period")
    }

    /// Position reduced to `[0, corners)`.
    pub fn boundary_position(&self, t: &Rational) -> Rational {
        rational::modulo(&self.position(t), &self.n())
    }

    /// Corner index if the car is exactly at a corner at time `t`.
    pub fn corner_at(&self, t: &Rational) -> Option<usize> {
        let x = self.boundary_position(t);
        x.is_integer().then(|| x.to_integer() as usize)
    }

    pub fn stops(&self) -> Vec<Stop> {
        self.pieces(&self.period)
            .into_iter()
            .filter(|p| p.x0 == p.x1 && p.t0 < p.t1)
            .map(|p| Stop { position: rational::modulo(&p.x0, &self.n()), from: p.t0, to: p.t1 })
            .collect()
    }
}

/// Constant speed, one circuit per `period`, at corner `start` at time 0.
pub fn uniform_schedule(face: &Face, start: usize, period: Rational) -> Result<FlowSchedule, CrashError> {
    FlowSchedule::new(
        &face.id,
        face.len(),
        period,
        vec![Breakpoint { time: Rational::zero(), position: int(start as i64) }],
    )
}

fn signs(face: &Face) -> Vec<Dir> {
    face.boundary.iter().map(|s| s.dir).collect()
}

/// The corner where the standard car starts: `b0` on a type I face (the
/// corner reached by a `+` step that follows another `+` step), `b0^-1` on
/// I' (the corner just before the two consecutive `-` steps), and the
/// corner reached by the `+` step on II and II'.
pub fn standard_start_corner(face: &Face) -> Result<usize, CrashError> {
    let d = signs(face);
    let n = d.len();
    let ty = face.face_type.ok_or_else(|| CrashError::NoStartCorner(face.id.clone()))?;
    let found = match ty {
        FaceType::I => (0..n).find(|&k| d[k] == Dir::With && d[(k + n - 1) % n] == Dir::With),
        FaceType::IPrime => (0..n).find(|&k| d[(k + 1) % n] == Dir::Against && d[(k + 2) % n] == Dir::Against),
        FaceType::II | FaceType::IIPrime => (0..n).find(|&k| d[k] == Dir::With),
        FaceType::Infinity => None,
    };
    found.ok_or_else(|| CrashError::NoStartCorner(face.id.clone()))
}

fn face_type_name(face: &Face) -> String {
    face.face_type.map_or("none".to_string(), |t| format!("{t:?}"))
}

/// Type I: corners at times `0..=2r+1`, a stop of `max(2r-1, 0)` at `c`.
/// Type I': a stop of the same length at `c^-1`, reached at time 1.
pub fn standard_schedule(face: &Face, r: u32) -> Result<FlowSchedule, CrashError> {
    let n = 2 * r as usize + 3;
    if face.len() != n {
        return Err(CrashError::CornerCount { face: face.id.clone(), expected: n, found: face.len() });
    }
    let stop_at = match face.face_type {
        Some(FaceType::I) => n - 1,
        Some(FaceType::IPrime) => 1,
        _ => {
            return Err(CrashError::FaceType {
                face: face.id.clone(),
                expected: "I or I'",
                found: face_type_name(face),
            })
        }
    };
    let start = standard_start_corner(face)? as i64;
    let stop = (2 * r as i64 - 1).max(0);
    let mut breakpoints = Vec::new();
    let mut time = 0i64;
    for k in 0..n as i64 {
        breakpoints.push(Breakpoint { time: int(time), position: int(start + k) });
        if k as usize == stop_at && stop > 0 {
            time += stop;
            breakpoints.push(Breakpoint { time: int(time), position: int(start + k) });
        }
        time += 1;
    }
    FlowSchedule::new(&face.id, n, int(time), breakpoints)
}

/// Types II and II': two corners at times 0 and 1, period 2.
pub fn standard_schedule_ii(face: &Face) -> Result<FlowSchedule, CrashError> {
    if face.len() != 2 {
        return Err(CrashError::CornerCount { face: face.id.clone(), expected: 2, found: face.len() });
    }
    if !face.face_type.is_some_and(|t| t.is_two_gon_type()) {
        return Err(CrashError::FaceType { face: face.id.clone(), expected: "II or II'", found: face_type_name(face) });
    }
    uniform_schedule(face, standard_start_corner(face)?, int(2))
}

/// Standard schedules when every face other than `e_infinity` carries a
/// type; otherwise uniform unit-period schedules with seeded start corners.
/// `e_infinity` gets a uniform schedule either way.
pub fn default_schedules(complex: &SphereComplex, seed: u64) -> Result<Schedules, CrashError> {
    let inf = &complex.distinguished.e_infinity;
    let typed = complex
        .faces
        .iter()
        .filter(|f| &f.id != inf)
        .all(|f| matches!(f.face_type, Some(t) if t != FaceType::Infinity));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Schedules::new();
    for face in &complex.faces {
        let schedule = if typed && &face.id != inf {
            match face.face_type {
                Some(FaceType::II | FaceType::IIPrime) => standard_schedule_ii(face)?,
                _ => standard_schedule(face, (face.len().saturating_sub(3) / 2) as u32)?,
            }
        } else {
            let start = rng.gen_range(0..face.len().max(1));
            uniform_schedule(face, start, Rational::one())?
        };
        out.insert(face.id.clone(), schedule);
    }
    Ok(out)
}
