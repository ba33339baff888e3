//! Exact degree-two cohomology of finite hyperplane arrangements over `Z/ell^k`,
//! the dual two-step nilpotent model of their fundamental groups, inertia
//! detection, and reconstruction of Galois actions from symmetries.

pub mod algebra;
pub mod arrangement;
pub mod cohomology;
pub mod error;
pub mod format;
pub mod galois;
pub mod local_theory;
pub mod nilpotent;
pub mod suites;
pub mod symmetry;

pub use error::{Error, Result};
