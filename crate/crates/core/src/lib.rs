#![no_std]

extern crate alloc;

pub mod error;
pub mod bounds;
pub mod cluster;
pub mod forests;
pub mod graph;
pub mod grassmann;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod singlesite;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
