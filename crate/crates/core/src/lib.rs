// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conventions;
pub mod dirac;
pub mod error;
pub mod exec;
pub mod fock;
pub mod grassmann;
pub mod gridio;
pub mod lattice;
pub mod operator;
pub mod path_integral;
pub mod quadrature;
pub mod sample;
pub mod selftest;
pub mod transform;
pub mod weyl;

#[cfg(test)]
mod testutil;

pub use conventions::{conventions_hash, CONVENTIONS};
pub use error::{Error, Result};
