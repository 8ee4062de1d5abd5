use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use super::schedule::{Breakpoint, FlowSchedule, Piece, Schedules};
use super::simulate::common_period;
use super::CrashError;
use crate::rational::{self, int, Rational};
use crate::sphere_complex::{Dir, SphereComplex};

/// The car `A` on `e_infinity` together with where and when it meets `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdversarialSetup {
    pub schedule: FlowSchedule,
    pub omega_edge: String,
    /// Edge coordinate of the meeting point, 0 at the tail and 1 at the head.
    #[serde(with = "rational")]
    pub omega_coordinate: Rational,
    /// Meeting time reduced into one period.
    #[serde(with = "rational")]
    pub meeting_time: Rational,
}

/// Latest time at which the car is at unwrapped position `x`.
fn last_time_at(pieces: &[Piece], x: &Rational) -> Option<Rational> {
    pieces.iter().filter(|p| p.x0 <= *x && *x <= p.x1).map(|p| if p.x0 == p.x1 { p.t1 } else { p.time_at(x) }).max()
}

/// Schedules `A` so that it meets `B` (the car of the face across the loop
/// bounding `e_infinity`) only at the point `omega` of the loop, given in
/// `A`'s own coordinate in `(0, 1)`.
///
/// Starting at the meeting, `A` creeps forward a quarter of the remaining
/// way while `B` finishes the loop and leaves `v0`, runs almost a full lap
/// while `B` is away, and creeps back up to `omega` as `B` returns.
pub fn adversarial_schedule(
    complex: &SphereComplex,
    b: &FlowSchedule,
    omega: Rational,
) -> Result<AdversarialSetup, CrashError> {
    if omega <= Rational::zero() || omega >= Rational::one() {
        return Err(CrashError::OmegaOutOfRange);
    }
    let inf = complex
        .face(&complex.distinguished.e_infinity)
        .ok_or_else(|| CrashError::UnknownFace(complex.distinguished.e_infinity.clone()))?;
    let [step] = inf.boundary.as_slice() else { return Err(CrashError::NotSingleLoop) };
    let edge = complex.edge(&step.edge).ok_or_else(|| CrashError::UnknownFace(step.edge.clone()))?;
    if edge.tail != edge.head {
        return Err(CrashError::NotSingleLoop);
    }
    let e1 = complex.face(&b.face).ok_or_else(|| CrashError::UnknownFace(b.face.clone()))?;
    let s_b = e1
        .boundary
        .iter()
        .position(|s| s.edge == step.edge && s.dir != step.dir)
        .ok_or(CrashError::NoProperContainment)?;
    if e1.len() < 2 || b.corners != e1.len() {
        return Err(CrashError::NoProperContainment);
    }

    let period = b.period;
    let pieces = b.pieces(&(period * int(3)));
    // B covers the loop while its position runs over (s_b - 1, s_b) mod n,
    // where its fraction along the step is 1 - omega in A's terms.
    let n = int(e1.len() as i64);
    let target_in_step = Rational::one() - omega;
    let x_start = pieces.first().map(|p| p.x0).ok_or(CrashError::NoProperContainment)?;
    let first_lap = ((x_start - int(s_b as i64 - 1) - target_in_step) / n).ceil();
    let mut x_omega = int(s_b as i64 - 1) + target_in_step + first_lap * n;
    let t_omega = loop {
        let t = last_time_at(&pieces, &x_omega).ok_or(CrashError::NoProperContainment)?;
        if t >= period {
            break t;
        }
        x_omega += n;
    };
    let lo = x_omega.floor();
    let enter = last_time_at(&pieces, &lo).ok_or(CrashError::NoProperContainment)?;
    let exit = last_time_at(&pieces, &(lo + Rational::one())).ok_or(CrashError::NoProperContainment)?;
    let on_loop = exit - enter;
    if on_loop >= period {
        return Err(CrashError::NoProperContainment);
    }
    let gap = (period - on_loop) / int(4);
    let ahead = (Rational::one() - omega) / int(4);
    let behind = omega / int(4);
    let breakpoints = vec![
        Breakpoint { time: t_omega, position: omega },
        Breakpoint { time: exit + gap, position: omega + ahead },
        Breakpoint { time: enter + period - gap, position: Rational::one() + omega - behind },
    ];
    let schedule = FlowSchedule::new(&inf.id, 1, period, breakpoints)?;
    let omega_coordinate = if step.dir == Dir::With { omega } else { Rational::one() - omega };
    Ok(AdversarialSetup {
        schedule,
        omega_edge: step.edge.clone(),
        omega_coordinate,
        meeting_time: rational::modulo(&t_omega, &period),
    })
}

/// Constant-speed `A` leaving `v0` at time 0; the negative control for
/// [`adversarial_schedule`].
pub fn naive_schedule(complex: &SphereComplex, period: Rational) -> Result<FlowSchedule, CrashError> {
    let inf = complex
        .face(&complex.distinguished.e_infinity)
        .ok_or_else(|| CrashError::UnknownFace(complex.distinguished.e_infinity.clone()))?;
    super::schedule::uniform_schedule(inf, 0, period)
}

/// Period-2 flow in which every car other than `A` crosses its first edge
/// traversed in the direction `A` uses on `e_infinity` during `(0, 1)` and
/// the rest of its boundary during `(1, 2)`. `A` laps `e_infinity` during
/// `(0, 1)` and waits at `omega` (on step `omega_step` of `e_infinity`)
/// during `[1, 2]`. Returns the schedules and the common uphill direction.
pub fn uphill_schedule(
    complex: &SphereComplex,
    omega_step: usize,
    omega: Rational,
) -> Result<(Schedules, Dir), CrashError> {
    if omega <= Rational::zero() || omega >= Rational::one() {
        return Err(CrashError::OmegaOutOfRange);
    }
    let inf_id = &complex.distinguished.e_infinity;
    let inf = complex.face(inf_id).ok_or_else(|| CrashError::UnknownFace(inf_id.clone()))?;
    let dirs: BTreeSet<Dir> = inf.boundary.iter().map(|s| s.dir).collect();
    let [uphill] = dirs.into_iter().collect::<Vec<_>>()[..] else { return Err(CrashError::IncoherentOrientation) };
    if omega_step >= inf.len() {
        return Err(CrashError::OmegaOutOfRange);
    }
    let mut out = Schedules::new();
    for face in &complex.faces {
        let n = face.len();
        let schedule = if &face.id == inf_id {
            let y = int(omega_step as i64 - 1) + omega;
            FlowSchedule::new(
                &face.id,
                n,
                int(2),
                vec![
                    Breakpoint { time: int(0), position: y },
                    Breakpoint { time: int(1), position: y + int(n as i64) },
                ],
            )?
        } else {
            let k = face
                .boundary
                .iter()
                .position(|s| s.dir == uphill)
                .ok_or_else(|| CrashError::NoUphillEdge(face.id.clone()))?;
            let start = int(((k + n - 1) % n) as i64);
            FlowSchedule::new(
                &face.id,
                n,
                int(2),
                vec![
                    Breakpoint { time: int(0), position: start },
                    Breakpoint { time: int(1), position: start + Rational::one() },
                ],
            )?
        };
        out.insert(face.id.clone(), schedule);
    }
    Ok((out, uphill))
}

/// Maximal open time intervals in one common period during which every car
/// except `A` is inside an edge that it traverses in direction `uphill`.
pub fn uphill_windows(
    complex: &SphereComplex,
    schedules: &Schedules,
    uphill: Dir,
) -> Result<Vec<(Rational, Rational)>, CrashError> {
    let period = common_period(schedules);
    let inf_id = &complex.distinguished.e_infinity;
    let mut cuts: BTreeSet<Rational> = [Rational::zero(), period].into();
    let mut cars = Vec::new();
    for face in complex.faces.iter().filter(|f| &f.id != inf_id) {
        let s = schedules.get(&face.id).ok_or_else(|| CrashError::MissingSchedule(face.id.clone()))?;
        let pieces = s.pieces(&period);
        for p in &pieces {
            cuts.insert(p.t0);
            cuts.insert(p.t1);
            if p.x0 < p.x1 {
                let mut j = p.x0.ceil();
                while j <= p.x1 {
                    cuts.insert(p.time_at(&j));
                    j += Rational::one();
                }
            }
        }
        cars.push((face, s));
    }
    let cuts: Vec<Rational> = cuts.into_iter().collect();
    let mut windows: Vec<(Rational, Rational)> = Vec::new();
    for w in cuts.windows(2) {
        let mid = (w[0] + w[1]) / int(2);
        let good = cars.iter().all(|(face, s)| {
            let x = s.boundary_position(&mid);
            !x.is_integer() && face.boundary[(x.floor().to_integer() as usize + 1) % face.len()].dir == uphill
        });
        if good {
            match windows.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1],
                _ => windows.push((w[0], w[1])),
            }
        }
    }
    Ok(windows)
}
