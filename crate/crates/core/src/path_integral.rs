//! Phase-space path integral on the prime lattice.
//!
//! One time step is the transfer matrix
//! `T[q',q] = (1/N) Σ_p ω^{p(q'−q)} exp(−iε H(p, (q'+q)/2))` with the Weyl
//! symbol of `H` evaluated at the lattice midpoint (`1/2` is the inverse of
//! two mod N). Imaginary time replaces `−iε` by `−ε`. The propagator is `Tⁿ`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::lattice::PrimePhaseSpace;
use crate::operator::{mat_exp_matrix, matrix_power, BasisTag, ComplexOperator, C64, I, ZERO};
use crate::weyl::{shift_x, weyl_symbol, PhaseSpaceFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMode {
    RealTime,
    Matsubara,
}

/// A propagation problem: `exp(−iHt)` or `exp(−βH)` split into `n` steps.
#[derive(Debug, Clone)]
pub struct PropagatorJob {
    space: PrimePhaseSpace,
    hamiltonian: ComplexOperator,
    symbol: PhaseSpaceFunction,
    time: f64,
    n_steps: u32,
    mode: TimeMode,
}

impl PropagatorJob {
    /// `time` is `t` in real time and `β` in imaginary time.
    pub fn new(space: &PrimePhaseSpace, hamiltonian: ComplexOperator, time: f64, n_steps: u32, mode: TimeMode) -> Result<Self> {
        space.require_odd()?;
        let defect = hamiltonian.hermiticity_defect();
        if defect > 1e-10 {
            return Err(Error::NonHermitianHamiltonian(defect));
        }
        if n_steps == 0 {
            return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
        }
        if !time.is_finite() {
            return Err(Error::InvalidArgument(format!("time {time} is not finite")));
        }
        let symbol = weyl_symbol(&hamiltonian, space)?;
        Ok(Self { space: space.clone(), hamiltonian, symbol, time, n_steps, mode })
    }

    pub fn with_steps(&self, n_steps: u32) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
        }
        Ok(Self { n_steps, ..self.clone() })
    }

    pub fn space(&self) -> &PrimePhaseSpace {
        &self.space
    }

    pub fn hamiltonian(&self) -> &ComplexOperator {
        &self.hamiltonian
    }

    pub fn n_steps(&self) -> u32 {
        self.n_steps
    }

    pub fn mode(&self) -> TimeMode {
        self.mode
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn epsilon(&self) -> f64 {
        self.time / self.n_steps as f64
    }

    /// Exponent factor multiplying `H` in one step: `−iε` or `−ε`.
    fn step_factor(&self) -> C64 {
        match self.mode {
            TimeMode::RealTime => -I * self.epsilon(),
            TimeMode::Matsubara => C64::from(-self.epsilon()),
        }
    }

    fn midpoint(&self, q_new: usize, q_old: usize) -> usize {
        let n = self.space.modulus();
        let inv2 = self.space.inv2().expect("odd modulus");
        ((q_new + q_old) % n) * inv2 % n
    }
}

/// The one-step transfer matrix.
pub fn step_transfer(job: &PropagatorJob) -> ComplexOperator {
    step_transfer_with(job, Execution::default())
}

pub fn step_transfer_with(job: &PropagatorJob, exec: Execution) -> ComplexOperator {
    let space = &job.space;
    let n = space.modulus();
    let h = job.symbol.grid();
    let factor = job.step_factor();
    let scale = 1.0 / n as f64;
    let vals = map_indexed(exec, n * n, |k| {
        let (qn, qo) = (k / n, k % n);
        let mid = job.midpoint(qn, qo);
        let d = (qn + n - qo) % n;
        (0..n).fold(ZERO, |acc, p| acc + space.omega_idx(p * d) * (factor * h[(p, mid)]).exp()) * scale
    });
    ComplexOperator::from_parts(DMatrix::from_row_slice(n, n, &vals), BasisTag::Position(n))
}

/// `Tⁿ`.
pub fn propagate(job: &PropagatorJob) -> ComplexOperator {
    let t = step_transfer(job);
    ComplexOperator::from_parts(matrix_power(t.matrix(), job.n_steps), t.basis().clone())
}

/// `exp(−iHt)` or `exp(−βH)` by matrix exponential.
pub fn exact_propagator(job: &PropagatorJob) -> Result<ComplexOperator> {
    let factor = match job.mode {
        TimeMode::RealTime => -I * job.time,
        TimeMode::Matsubara => C64::from(-job.time),
    };
    let m = mat_exp_matrix(&(job.hamiltonian.matrix() * factor), 1e-15)?;
    Ok(ComplexOperator::from_parts(m, BasisTag::Position(job.space.modulus())))
}

/// Largest singular value of `a`.
pub fn spectral_norm(a: &DMatrix<C64>) -> f64 {
    a.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `‖Tⁿ − exact‖₂`.
pub fn propagation_error(job: &PropagatorJob) -> Result<f64> {
    let k = propagate(job);
    let e = exact_propagator(job)?;
    Ok(spectral_norm(&(k.matrix() - e.matrix())))
}

/// `Tr Tⁿ` for a Matsubara job, approximating `Tr e^{−βH}`.
pub fn matsubara_trace(job: &PropagatorJob) -> Result<C64> {
    if job.mode != TimeMode::Matsubara {
        return Err(Error::InvalidArgument("matsubara_trace needs an imaginary-time job".into()));
    }
    Ok(propagate(job).trace())
}

/// `Tr e^{−βH}` from the spectrum.
pub fn exact_partition_function(job: &PropagatorJob) -> f64 {
    job.hamiltonian.hermitian_eigenvalues().iter().map(|e| (-job.time * e).exp()).sum()
}

/// Exponent `S` of one lattice path, so that the path weight is `e^{iS}`:
/// `S = Σ_j [(2π/N) p_j (q_j − q_{j−1}) + i·f·H(p_j, midpoint_j)]` where `f`
/// is the step factor `−iε` (real time) or `−ε` (imaginary time).
pub fn action_sum(ps: &[i64], qs: &[i64], job: &PropagatorJob) -> Result<C64> {
    if qs.len() != ps.len() + 1 {
        return Err(Error::LengthMismatch(format!("{} momenta need {} positions, got {}", ps.len(), ps.len() + 1, qs.len())));
    }
    let space = &job.space;
    let n = space.modulus();
    let two_pi_n = std::f64::consts::TAU / n as f64;
    let factor = job.step_factor();
    let mut s = ZERO;
    for (j, &p) in ps.iter().enumerate() {
        let (qo, qn) = (qs[j], qs[j + 1]);
        let mid = job.midpoint(space.residue(qn).index(n), space.residue(qo).index(n));
        let h = job.symbol.grid()[(space.residue(p).index(n), mid)];
        s += C64::from(two_pi_n * (p * (qn - qo)) as f64) - I * factor * h;
    }
    Ok(s)
}

/// `−hop (X + X†) + V(q)` in the position basis.
pub fn hopping_hamiltonian(space: &PrimePhaseSpace, hop: f64, potential: impl Fn(i64) -> f64) -> ComplexOperator {
    let n = space.modulus();
    let x = shift_x(space, 1);
    let kinetic = (x.matrix() + x.matrix().adjoint()) * C64::from(-hop);
    let pot = DMatrix::from_fn(n, n, |r, c| if r == c { C64::from(potential(space.residue_at(r).value())) } else { ZERO });
    ComplexOperator::from_parts(kinetic + pot, BasisTag::Position(n))
}

/// The standard mixed test case `−(X + X†) + cos(2πq/N)`.
pub fn mixed_test_hamiltonian(space: &PrimePhaseSpace) -> ComplexOperator {
    let n = space.modulus() as f64;
    hopping_hamiltonian(space, 1.0, |q| (std::f64::consts::TAU * q as f64 / n).cos())
}
