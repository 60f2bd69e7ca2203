//! Spine spaces of Grassmann spaces over prime fields, the line relations of
//! coplanarity and of lying in one pencil, and recovery of the point
//! geometry from the bare line relation.

pub mod bundles;
pub mod cliques;
pub mod error;
pub mod excluded;
pub mod foundations;
pub mod gf;
pub mod grassmann;
pub mod pencils;
pub mod relations;
pub mod report;
pub mod spine;
pub mod suite;

pub use error::{Error, Result};
pub use gf::{FieldSpec, Subspace};
pub use spine::{SpineParams, SpineSpace};
