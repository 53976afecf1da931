//! Monochromatic random waves, their nodal sets, and Gaussian comparison fields.

// `!(x >= 0.0)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod directions;
pub mod error;
pub mod field;
pub mod gaussian;
pub mod grid;
pub mod growth;
pub mod linalg;
pub mod nodal;
pub mod partition;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
