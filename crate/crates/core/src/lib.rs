//! Decides whether the Gauss map of a submanifold of a Lie group with a
//! left-invariant metric is harmonic, working entirely at the level of the
//! Lie algebra: structure constants, an inner product, a tangent subspace,
//! and (optionally) second-fundamental-form data at a point.
//!
//! Modules:
//! - [`lie`]: structure-constant Lie algebras (bracket, Killing form, center).
//! - [`metric`]: left-invariant metrics, Koszul connection, curvature.
//! - [`subspace`]: rank-revealed linear subspaces of the algebra.
//! - [`structure`]: compact splittings, simple ideals, Lie triple systems.
//! - [`harmonicity`]: the harmonicity residual criteria and the metric
//!   classification for totally geodesic submanifolds.
//! - [`nilpotent`]: two-step nilpotent groups and geodesic Gauss maps.
//! - [`catalog`]: built-in example algebras used as references and fixtures.

pub mod catalog;
pub mod error;
pub mod harmonicity;
pub mod lie;
mod linalg;
pub mod metric;
pub mod nilpotent;
pub mod structure;
pub mod subspace;

pub use error::{Error, Result};
pub use lie::{BracketEntry, LieAlgebra};
pub use metric::{InnerProduct, MetricLieAlgebra};
pub use subspace::{Subspace, Vector};

/// Default tolerance for verdicts and precondition checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default seed for the randomized pieces (ideal splitting, probing).
pub const DEFAULT_SEED: u64 = 42;
