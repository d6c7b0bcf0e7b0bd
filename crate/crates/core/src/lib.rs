//! Norms of dominating mixed smoothness for sampled functions.
//!
//! Functions live on uniform grids over boxes in one to three dimensions
//! ([`grid`]). Besov norms are available through differences
//! ([`differences`]) and through dyadic frequency decompositions
//! ([`fourier`]); Sobolev norms through derivatives ([`sobolev`]). The
//! [`multipliers`] and [`counterexamples`] modules turn these into ratio and
//! rate experiments on concrete function families.

pub mod counterexamples;
pub mod differences;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod multipliers;
pub mod profile;
pub mod random;
pub mod sobolev;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use grid::{Extension, GridBox, GridFunction};
