//! Exact polynomials: sparse multivariate and dense univariate.

mod sparse;
mod uni;

pub use sparse::{CompiledPoly, SparsePoly};
pub use uni::{PositiveRoot, UniPoly};
