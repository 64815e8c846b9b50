//! Finite-field phase-space arithmetic on an N-point prime lattice.
//!
//! Positions and momenta are residues mod N stored in the symmetric range
//! `-(N-1)/2 ..= (N-1)/2`. The Fourier pairing between the two bases is
//! `⟨q|p⟩ = N^{-1/2} ω^{pq}` with `ω = e^{2πi/N}`, so the DFT matrix is
//! bijective and unitary. The qubit case N = 2 is accepted but flagged: it has
//! no inverse of 2, and only the Pauli/Hadamard operations use it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operator::{BasisTag, ComplexOperator, C64};

/// A residue class mod N held as its symmetric representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Residue(i64);

impl Residue {
    pub fn value(self) -> i64 {
        self.0
    }

    /// Array index `value mod N`.
    pub fn index(self, modulus: usize) -> usize {
        self.0.rem_euclid(modulus as i64) as usize
    }
}

impl std::fmt::Display for Residue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The arena for lattice positions and momenta.
#[derive(Debug, Clone)]
pub struct PrimePhaseSpace {
    modulus: usize,
    inv2: Option<usize>,
    omega: Vec<C64>,
}

impl PrimePhaseSpace {
    /// Builds and validates the space; `N = 2` yields a qubit-mode space.
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::ModulusTooSmall(modulus));
        }
        if !is_prime(modulus) {
            return Err(Error::CompositeModulus(modulus));
        }
        if modulus > 1 << 20 {
            return Err(Error::InvalidArgument(format!("modulus {modulus} is too large for dense kernels")));
        }
        let n = modulus as usize;
        let inv2 = (n != 2).then(|| n.div_ceil(2));
        let omega = (0..n)
            .map(|k| {
                // Symmetric angle keeps the table conjugate-symmetric to the last bit.
                let s = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                let (sin, cos) = (std::f64::consts::TAU * s / n as f64).sin_cos();
                C64::new(cos, sin)
            })
            .collect();
        Ok(Self { modulus: n, inv2, omega })
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    /// `(N+1)/2`, absent in qubit mode.
    pub fn inv2(&self) -> Option<usize> {
        self.inv2
    }

    pub fn qubit_mode(&self) -> bool {
        self.inv2.is_none()
    }

    pub(crate) fn require_odd(&self) -> Result<usize> {
        self.inv2.ok_or(Error::QubitModeUnsupported)
    }

    /// `ω^k` by table lookup.
    #[inline]
    pub fn omega(&self, k: i64) -> C64 {
        self.omega[k.rem_euclid(self.modulus as i64) as usize]
    }

    /// `ω^k` for an already-reduced exponent.
    #[inline]
    pub(crate) fn omega_idx(&self, k: usize) -> C64 {
        self.omega[k % self.modulus]
    }

    pub fn residue(&self, k: i64) -> Residue {
        let n = self.modulus as i64;
        let mut r = k.rem_euclid(n);
        if self.modulus != 2 && r > (n - 1) / 2 {
            r -= n;
        }
        Residue(r)
    }

    /// Residue for an array index.
    pub fn residue_at(&self, index: usize) -> Residue {
        self.residue(index as i64)
    }

    /// All residues in array-index order.
    pub fn residues(&self) -> impl Iterator<Item = Residue> + '_ {
        (0..self.modulus).map(move |i| self.residue_at(i))
    }

    pub fn add(&self, a: Residue, b: Residue) -> Residue {
        self.residue(a.0 + b.0)
    }

    pub fn mul(&self, a: Residue, b: Residue) -> Residue {
        self.residue(a.0 * b.0)
    }

    pub fn neg(&self, a: Residue) -> Residue {
        self.residue(-a.0)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self, a: Residue) -> Option<Residue> {
        let n = self.modulus as i64;
        let a = a.0.rem_euclid(n);
        if a == 0 {
            return None;
        }
        // Fermat: a^(N-2) mod N.
        Some(self.residue(pow_mod(a as u64, self.modulus as u64 - 2, self.modulus as u64) as i64))
    }

    /// Largest violation of `ω^k ω^m = ω^{k+m}` over the whole table.
    pub fn root_table_defect(&self) -> f64 {
        let n = self.modulus;
        let mut worst = 0.0f64;
        for k in 0..n {
            for m in 0..n {
                let d = (self.omega[k] * self.omega[m] - self.omega[(k + m) % n]).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Copy of the space with one root of unity perturbed; used for fault
    /// injection in the self-test.
    #[doc(hidden)]
    pub fn with_corrupted_root(&self, k: usize, delta: f64) -> Self {
        let mut out = self.clone();
        let idx = k % self.modulus;
        out.omega[idx] *= C64::from_polar(1.0, delta);
        out
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Momentum eigenstate `|p⟩` in the position basis.
pub fn momentum_ket(space: &PrimePhaseSpace, p: i64) -> DVector<C64> {
    let n = space.modulus();
    let norm = 1.0 / (n as f64).sqrt();
    DVector::from_fn(n, |q, _| space.omega(p * q as i64) * norm)
}

/// Position eigenstate `|q⟩`.
pub fn position_ket(space: &PrimePhaseSpace, q: i64) -> DVector<C64> {
    let n = space.modulus();
    let mut v = DVector::zeros(n);
    v[space.residue(q).index(n)] = C64::new(1.0, 0.0);
    v
}

/// Matrix whose column p is `momentum_ket(p)`; the Hadamard matrix for N = 2.
pub fn dft_matrix(space: &PrimePhaseSpace) -> ComplexOperator {
    let n = space.modulus();
    let norm = 1.0 / (n as f64).sqrt();
    let m = DMatrix::from_fn(n, n, |q, p| space.omega_idx(q * p) * norm);
    ComplexOperator::from_parts(m, BasisTag::Position(n))
}

/// Parity operator `|q⟩ ↦ |-q⟩`.
pub fn parity(space: &PrimePhaseSpace) -> ComplexOperator {
    let n = space.modulus();
    let m = DMatrix::from_fn(n, n, |r, c| {
        if (r + c) % n == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    ComplexOperator::from_parts(m, BasisTag::Position(n))
}
