//! Geometric torsion invariants of triangulated 3-manifolds with boundary.

pub mod complex;
pub mod error;
pub mod grassmann;
pub mod geometry;
pub mod gluing;
pub mod linalg;
pub mod rigidity;
pub mod triangulation;

pub use error::{Error, Result};
pub mod verify;
