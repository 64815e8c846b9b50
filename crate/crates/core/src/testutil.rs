//! Random fixtures shared by the unit tests.

pub use crate::sample::{random_density, random_matrix, random_operator, rng};
