//! Isoparametric tubes around the homogeneous submanifolds `W_w` of complex
//! hyperbolic space `CH^n`.
//!
//! The geometry is computed at the Lie algebra level of the solvable model
//! `AN`: [`model`] holds the metric Lie algebra, [`subspace`] and
//! [`submanifold`] describe `w^⊥` and the extrinsic geometry of `W_w`,
//! [`tube`] and [`charpoly`] the tubes `M^r`, and [`report`] drives the
//! command-line reports.

pub mod charpoly;
pub mod error;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod report;
pub mod sampling;
pub mod submanifold;
pub mod subspace;
pub mod tube;

pub use error::{GeometryError, Result};
pub use model::{AlgebraVector, ModelSpace};
pub use subspace::{AngleCase, KaehlerDecomposition, NormalSubspace, Preset};
