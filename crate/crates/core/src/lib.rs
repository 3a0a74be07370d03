//! Mass-action reaction networks drawn as Euclidean embedded graphs.
//!
//! The crate builds the polynomial dynamical system of a network, computes
//! the equations of its toric (complex balanced) locus, classifies line
//! networks into chambers, and looks for complex balanced realizations on
//! other graphs ("disguised toric" systems).

pub mod balance;
pub mod chambers;
pub mod cli;
pub mod disguised;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod massaction;
pub mod model;
pub mod network_io;
pub mod poly;
pub mod rational;

pub use error::{Error, Result};
pub use model::{EGraph, RateAssignment, RationalVec};
pub use poly::{SparsePoly, UniPoly};
pub use rational::Q;
