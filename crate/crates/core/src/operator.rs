//! Dense complex operators.
//!
//! [`ComplexOperator`] wraps an `nalgebra` matrix together with a [`BasisTag`]
//! naming the Hilbert space it acts on. Products and commutators refuse to mix
//! operators from different spaces; `Generic` tags match any space of the same
//! dimension.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// The Hilbert space an operator acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisTag {
    /// Lattice position basis of an N-point prime lattice.
    Position(usize),
    /// Lattice momentum basis of an N-point prime lattice.
    Momentum(usize),
    /// Truncated Fock space with M levels.
    Fock(usize),
    /// Spin-1/2 chain of L sites (dimension 2^L).
    SpinChain(usize),
    /// Four-component Dirac spinors.
    Dirac4,
    /// Periodic L×L lattice (dimension L²).
    Grid2D(usize),
    /// Tensor product of two spaces.
    Tensor(Box<BasisTag>, Box<BasisTag>),
    /// Untagged space of the given dimension.
    Generic(usize),
}

impl BasisTag {
    pub fn dim(&self) -> usize {
        match self {
            BasisTag::Position(n) | BasisTag::Momentum(n) | BasisTag::Fock(n) => *n,
            BasisTag::SpinChain(l) => 1usize << l,
            BasisTag::Dirac4 => 4,
            BasisTag::Grid2D(l) => l * l,
            BasisTag::Tensor(a, b) => a.dim() * b.dim(),
            BasisTag::Generic(d) => *d,
        }
    }

    fn compatible(&self, other: &BasisTag) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        matches!(self, BasisTag::Generic(_)) || matches!(other, BasisTag::Generic(_)) || self == other
    }
}

/// A dense square complex matrix tagged with its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexOperator {
    matrix: DMatrix<C64>,
    basis: BasisTag,
}

impl ComplexOperator {
    /// Wraps a matrix, checking squareness, finiteness, and tag consistency.
    pub fn new(matrix: DMatrix<C64>, basis: BasisTag) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimMismatch(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() != basis.dim() {
            return Err(Error::DimMismatch(format!(
                "matrix dimension {} does not match basis {:?} (dimension {})",
                matrix.nrows(),
                basis,
                basis.dim()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        Ok(Self { matrix, basis })
    }

    /// Internal constructor for matrices produced by trusted kernels.
    pub(crate) fn from_parts(matrix: DMatrix<C64>, basis: BasisTag) -> Self {
        debug_assert_eq!(matrix.nrows(), basis.dim());
        Self { matrix, basis }
    }

    pub fn generic(matrix: DMatrix<C64>) -> Result<Self> {
        let d = matrix.nrows();
        Self::new(matrix, BasisTag::Generic(d))
    }

    pub fn identity(basis: BasisTag) -> Self {
        let d = basis.dim();
        Self::from_parts(DMatrix::identity(d, d), basis)
    }

    pub fn zeros(basis: BasisTag) -> Self {
        let d = basis.dim();
        Self::from_parts(DMatrix::zeros(d, d), basis)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn basis(&self) -> &BasisTag {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn with_basis(self, basis: BasisTag) -> Result<Self> {
        Self::new(self.matrix, basis)
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.basis.compatible(&other.basis) {
            Ok(())
        } else {
            Err(Error::DimMismatch(format!(
                "{:?} vs {:?}",
                self.basis, other.basis
            )))
        }
    }

    fn merged_tag(&self, other: &Self) -> BasisTag {
        if matches!(self.basis, BasisTag::Generic(_)) {
            other.basis.clone()
        } else {
            self.basis.clone()
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_parts(&self.matrix * &other.matrix, self.merged_tag(other)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_parts(&self.matrix + &other.matrix, self.merged_tag(other)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_parts(&self.matrix - &other.matrix, self.merged_tag(other)))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_parts(&self.matrix * factor, self.basis.clone())
    }

    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimMismatch(format!(
                "vector of length {} against operator of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(&self.matrix * v)
    }

    pub fn dagger(&self) -> Self {
        Self::from_parts(self.matrix.adjoint(), self.basis.clone())
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, exponent: u32) -> Self {
        Self::from_parts(matrix_power(&self.matrix, exponent), self.basis.clone())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_diff on operators of different size");
        max_abs(&(&self.matrix - &other.matrix))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(d, d)))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Eigenvalues of a Hermitian operator in ascending order.
    ///
    /// Real symmetric inputs take the real tridiagonalization path.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Eigenvalues of a general operator from its complex Schur form.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let schur = nalgebra::Schur::new(self.matrix.clone());
        let (_, t) = schur.unpack();
        (0..t.nrows()).map(|i| t[(i, i)]).collect()
    }
}

/// Largest absolute entry of a matrix.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut vals: Vec<f64> = if m.iter().all(|z| z.im == 0.0) {
        let real = m.map(|z| z.re);
        let real = (&real + real.transpose()) * 0.5;
        real.symmetric_eigenvalues().iter().copied().collect()
    } else {
        let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().collect()
    };
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

pub(crate) fn matrix_power(m: &DMatrix<C64>, mut exponent: u32) -> DMatrix<C64> {
    let d = m.nrows();
    let mut result = DMatrix::<C64>::identity(d, d);
    let mut base = m.clone();
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = &result * &base;
        }
        exponent >>= 1;
        if exponent > 0 {
            base = &base * &base;
        }
    }
    result
}

/// `AB - BA`.
pub fn commutator(a: &ComplexOperator, b: &ComplexOperator) -> Result<ComplexOperator> {
    a.check_compatible(b)?;
    let m = &a.matrix * &b.matrix - &b.matrix * &a.matrix;
    Ok(ComplexOperator::from_parts(m, a.merged_tag(b)))
}

/// `AB + BA`.
pub fn anticommutator(a: &ComplexOperator, b: &ComplexOperator) -> Result<ComplexOperator> {
    a.check_compatible(b)?;
    let m = &a.matrix * &b.matrix + &b.matrix * &a.matrix;
    Ok(ComplexOperator::from_parts(m, a.merged_tag(b)))
}

/// Kronecker product; the result carries a `Tensor` tag.
pub fn tensor(a: &ComplexOperator, b: &ComplexOperator) -> ComplexOperator {
    ComplexOperator::from_parts(
        a.matrix.kronecker(&b.matrix),
        BasisTag::Tensor(Box::new(a.basis.clone()), Box::new(b.basis.clone())),
    )
}

pub fn trace(a: &ComplexOperator) -> C64 {
    a.trace()
}

pub fn dagger(a: &ComplexOperator) -> ComplexOperator {
    a.dagger()
}

/// Matrix exponential by scaling and squaring of a Taylor series.
///
/// The input is scaled by 2^-s until its 1-norm is at most 1/2, the series is
/// summed until the next term falls below `tolerance` relative to the partial
/// sum, and the result is squared back s times.
pub fn mat_exp(a: &ComplexOperator, tolerance: f64) -> Result<ComplexOperator> {
    let m = mat_exp_matrix(a.matrix(), tolerance)?;
    Ok(ComplexOperator::from_parts(m, a.basis.clone()))
}

pub(crate) fn mat_exp_matrix(a: &DMatrix<C64>, tolerance: f64) -> Result<DMatrix<C64>> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::ConvergenceFailure("non-finite input".into()));
    }
    let d = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    if squarings > 1000 {
        return Err(Error::ConvergenceFailure(format!("norm {norm:e} too large")));
    }
    let scaled = a * C64::new(0.5f64.powi(squarings as i32), 0.0);

    let mut sum = DMatrix::<C64>::identity(d, d);
    let mut term = DMatrix::<C64>::identity(d, d);
    let tol = tolerance.max(f64::EPSILON * 0.25);
    let mut converged = false;
    for k in 1..=60 {
        term = &term * &scaled * C64::new(1.0 / k as f64, 0.0);
        sum += &term;
        if one_norm(&term) <= tol * one_norm(&sum).max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure("Taylor series did not converge in 60 terms".into()));
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if sum.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::ConvergenceFailure("overflow while squaring".into()));
    }
    Ok(sum)
}

fn one_norm(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Pauli matrices and the 2x2 identity in the (up, down) basis.
pub mod pauli {
    use super::*;

    pub fn identity() -> DMatrix<C64> {
        DMatrix::identity(2, 2)
    }

    pub fn x() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn z() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    /// (σx + iσy)/2 = |up⟩⟨down|.
    pub fn raising() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
    }

    /// (σx − iσy)/2 = |down⟩⟨up|.
    pub fn lowering() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
    }
}
