use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("modulus {0} is below the minimum of 2")]
    ModulusTooSmall(u64),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("operation requires an odd prime modulus (N = 2 has no inverse of 2)")]
    QubitModeUnsupported,
    #[error("matrix exponential did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("Fock cutoff {cutoff} too small for |alpha|^2 = {alpha_sq}")]
    CutoffTooSmall { cutoff: usize, alpha_sq: f64 },
    #[error("Grassmann elements belong to different algebras")]
    AlgebraMismatch,
    #[error("Grassmann algebra with {0} generators exceeds the cap of 12")]
    TooManyGenerators(usize),
    #[error("spin chain of length {0} exceeds the cap of 10")]
    ChainTooLong(usize),
    #[error("2j = {0} is not a valid spin (need 2j >= 1 and 2j + 1 <= 64)")]
    NonHalfIntegerSpin(f64),
    #[error("pairing |g| = {g} must stay below the mode energy E = {e}")]
    UnstablePairing { e: f64, g: f64 },
    #[error("coefficients are not canonical: u^2 + v^2 - 1 = {0:e}")]
    NotCanonical(f64),
    #[error("hamiltonian is not Hermitian (max defect {0:e})")]
    NonHermitianHamiltonian(f64),
    #[error("path length mismatch: {0}")]
    LengthMismatch(String),
    #[error("quadrature failed to reach tolerance (achieved {achieved:e}, wanted {wanted:e})")]
    QuadratureFailure { achieved: f64, wanted: f64 },
    #[error("flux denominator {q} does not divide the grid side {l}")]
    IncommensurateFlux { l: usize, q: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Numeric failures (as opposed to rejected inputs).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure(_) | Error::QuadratureFailure { .. }
        )
    }
}
