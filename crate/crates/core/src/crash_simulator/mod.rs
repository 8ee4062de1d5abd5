//! Cars driving anticlockwise around the faces of a sphere complex on
//! periodic piecewise-linear schedules, with exact detection of crashes.
//!
//! A car on a face with `n` corners has a position coordinate in which
//! corner `k` sits at `k` (mod `n`) and step `(k + 1) mod n` spans the open
//! interval `(k, k + 1)`.

mod adversarial;
mod reading;
mod schedule;
mod simulate;

use thiserror::Error;

use crate::rational::Rational;
use crate::sphere_complex::ComplexError;

pub use adversarial::{adversarial_schedule, naive_schedule, uphill_schedule, uphill_windows, AdversarialSetup};
pub use reading::{crash_vertex_reading, CornerKind, ReadingClass, ReadingCorner, VertexReading};
pub use schedule::{
    default_schedules, standard_schedule, standard_schedule_ii, standard_start_corner, uniform_schedule, Breakpoint,
    FlowSchedule, Schedules, Stop,
};
pub use simulate::{common_period, simulate, verify_at_least_two_crashes, CrashCheck, CrashEvent, Site};

#[derive(Debug, Error)]
pub enum CrashError {
    #[error("face '{face}' has {found} corners, expected {expected}")]
    CornerCount { face: String, expected: usize, found: usize },
    #[error("face '{face}' has type {found}, expected {expected}")]
    FaceType { face: String, expected: &'static str, found: String },
    #[error("face '{0}' has no recognisable start corner")]
    NoStartCorner(String),
    #[error("no schedule for face '{0}'")]
    MissingSchedule(String),
    #[error("schedule for unknown face '{0}'")]
    UnknownFace(String),
    #[error("invalid schedule for face '{face}': {reason}")]
    InvalidSchedule { face: String, reason: String },
    #[error("horizon {horizon} is shorter than the required {required}")]
    HorizonTooShort { horizon: String, required: String },
    #[error("horizon must be positive")]
    NonPositiveHorizon,
    #[error("e_infinity is not bounded by a single loop edge")]
    NotSingleLoop,
    #[error("no face other than e_infinity properly contains its boundary")]
    NoProperContainment,
    #[error("omega must lie strictly inside an edge of e_infinity")]
    OmegaOutOfRange,
    #[error("edges of e_infinity are not traversed coherently")]
    IncoherentOrientation,
    #[error("face '{0}' has no edge in the uphill direction")]
    NoUphillEdge(String),
    #[error("crash event is not a complete vertex crash")]
    NotCompleteVertexEvent,
    #[error("corner {index} of face '{face}' is unlabelled")]
    UnlabelledCorner { face: String, index: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

pub(crate) fn horizon_error(horizon: &Rational, required: &Rational) -> CrashError {
    CrashError::HorizonTooShort {
        horizon: crate::rational::format_rational(horizon),
        required: crate::rational::format_rational(required),
    }
}
