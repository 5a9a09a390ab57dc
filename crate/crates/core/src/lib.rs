//! Vacuum energy, stress tensor and Casimir forces of a scalar field on a
//! one-dimensional lattice with Dirichlet boundaries.

pub mod artefacts;
pub mod continuum;
pub mod error;
pub mod forces;
pub mod observables;
pub mod perturbation;
pub mod renorm;
pub mod lattice;
pub mod special;
pub mod spectral;
pub mod summation;

pub use error::{Error, Result};
