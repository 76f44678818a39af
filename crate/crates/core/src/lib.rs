//! Exact lower bounds on the degree of plane curves passing through `n`
//! general points of multiplicity `m`.

pub mod arith;
pub mod averaged;
pub mod bounds;
pub mod cli;
pub mod decimal;
pub mod error;
pub mod lattice;
pub mod unloading;
pub mod verify;

pub use arith::ExactRational;
pub use error::{Error, Result};
