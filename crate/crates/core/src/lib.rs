//! Null Lagrangians at the boundary: exact minor algebra, decision procedures,
//! numerical quasiconvexity tests and concentration experiments.

pub mod boundary;
pub mod conc;
pub mod error;
pub mod minors;
pub mod poly;
pub mod qcb;
pub mod random;
pub mod rational;

#[cfg(test)]
mod proptests;

pub use error::{Error, Result};
