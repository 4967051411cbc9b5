//! Identifying codes on the infinite square grid and the hexagonal grid.
//!
//! The crate covers the geometry of both grids, periodic codes and their
//! validity, the pair/witness structure of a code, the density lower bound
//! that follows from it, the discharging argument that averages pair counts,
//! an exhaustive verifier for the local case analyses those bounds rest on,
//! and exact and heuristic searches on finite tori as an empirical
//! cross-check.

pub mod bounds;
pub mod code;
pub mod discharge;
pub mod error;
pub mod grid;
pub mod localver;
pub mod pairs;
pub mod pattern;
pub mod torus;

pub use code::{PeriodicCode, ValidityReport, Violation, Window};
pub use error::{CodeError, DischargeError, LocalError, PairsError, ParseError, TorusError};
pub use grid::{GridKind, Vertex};
pub use num_rational::Rational64;

/// Fixed six-decimal rendering used by every report.
pub fn decimal(q: Rational64) -> String {
    format!("{:.6}", *q.numer() as f64 / *q.denom() as f64)
}

/// `p/q`, always with an explicit denominator.
pub fn fraction(q: Rational64) -> String {
    format!("{}/{}", q.numer(), q.denom())
}
