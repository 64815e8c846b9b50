//! Seeded random fixtures: operators, density matrices and matrices drawn
//! from a fixed-seed ChaCha stream, so every run of the self-test sees the
//! same samples.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::{BasisTag, ComplexOperator, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform in [−1, 1).
pub fn random_matrix(dim: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_operator(dim: usize, rng: &mut impl Rng) -> ComplexOperator {
    ComplexOperator::from_parts(random_matrix(dim, rng), BasisTag::Generic(dim))
}

/// GG†/Tr(GG†) for a random G; full rank with probability one.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> ComplexOperator {
    let g = random_matrix(dim, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    ComplexOperator::from_parts(rho / tr, BasisTag::Generic(dim))
}
