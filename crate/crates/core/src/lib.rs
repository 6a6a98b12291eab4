//! Infinitesimal rigidity of symmetric body-bar and body-hinge frameworks.
//!
//! A symmetric framework is described by its quotient gain graph together
//! with a point group `Γ` and its orthogonal representation. Rigidity is
//! decided two ways: numerically, from the ranks of the orbit rigidity
//! matrices (one per irreducible character of `Γ`), and for `Γ = (Z/2)^l`
//! combinatorially, from matroid unions of signed-graphic matroids on the
//! quotient graph.

pub mod algebra;
pub mod error;
pub mod gaingraph;
pub mod hinge;
pub mod genframe;
pub mod linalg;
pub mod matroid;
pub mod pipeline;
pub mod rigidity;
pub mod scalar;
pub mod schema;
pub mod symmetry;

pub use error::{Error, Result};
