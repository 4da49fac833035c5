//! Lattice solver for the perturbed Hermitian-Einstein heat flow on holomorphic
//! vector bundles over a (possibly punctured) Kähler surface patch, together
//! with the continuity driver `ε → 0` and slope-stability diagnostics.

pub mod bundle;
pub mod continuity;
pub mod endo;
pub mod error;
pub mod flow;
pub mod grid;
pub mod stability;

pub use error::{HeError, Result};
