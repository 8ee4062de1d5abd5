//! Exact computations for one-relator extensions `G * <t> / <<w>>` of a
//! free group `G`.
//!
//! - [`word_algebra`]: reduced words, cyclic reduction, conjugacy normal forms.
//! - [`klyachko_strata`]: level forms in the kernel of the exponent sum and the
//!   block decomposition of exponent-one words.
//! - [`sphere_complex`]: labelled cell subdivisions of the sphere and their checks.
//! - [`crash_simulator`]: car schedules on those subdivisions and exact crash detection.
//! - [`surjectivity_analyzer`]: verdicts on surjectivity of `G -> Ĝ` with evidence.

pub mod crash_simulator;
pub mod klyachko_strata;
pub mod rational;
pub mod report;
pub mod sphere_complex;
pub mod surjectivity_analyzer;
pub mod word_algebra;
