//! Spin, boson and fermion transformations.
//!
//! Spin-1/2 sites use the local basis `(|↑⟩, |↓⟩)` with `σz = diag(1, −1)`.
//! Jordan-Wigner fermions are `a_j = Π_{k<j}(−σz_k) σ⁻_j`, so that
//! `1 − 2a†a = −σz`, i.e. `a_j†a_j = (I + σz_j)/2`. Site 0 is the leftmost
//! Kronecker factor.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::annihilation_matrix;
use crate::operator::{hermitian_eigenvalues, max_abs, pauli, BasisTag, ComplexOperator, C64, ZERO};

pub const MAX_CHAIN: usize = 10;

/// Open spin-1/2 chain of `L ≤ 10` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinChain {
    length: usize,
}

impl SpinChain {
    pub fn new(length: usize) -> Result<Self> {
        if length > MAX_CHAIN {
            return Err(Error::ChainTooLong(length));
        }
        if length == 0 {
            return Err(Error::InvalidArgument("spin chain needs at least one site".into()));
        }
        Ok(Self { length })
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        1 << self.length
    }

    pub fn basis(&self) -> BasisTag {
        BasisTag::SpinChain(self.length)
    }

    /// `local` acting on `site`, identity elsewhere.
    pub fn site_operator(&self, site: usize, local: &DMatrix<C64>) -> ComplexOperator {
        assert!(site < self.length, "site {site} outside chain of {}", self.length);
        let mut m = DMatrix::<C64>::identity(1, 1);
        for k in 0..self.length {
            m = if k == site { m.kronecker(local) } else { m.kronecker(&pauli::identity()) };
        }
        ComplexOperator::from_parts(m, self.basis())
    }

    pub fn sigma_z(&self, site: usize) -> ComplexOperator {
        self.site_operator(site, &pauli::z())
    }
}

/// Fermion annihilators `a_j = Π_{k<j}(−σz_k) σ⁻_j`.
pub fn jordan_wigner_ops(chain: &SpinChain) -> Result<Vec<ComplexOperator>> {
    let minus_z = -pauli::z();
    (0..chain.len())
        .map(|j| {
            let mut m = DMatrix::<C64>::identity(1, 1);
            for k in 0..chain.len() {
                let local = match k.cmp(&j) {
                    std::cmp::Ordering::Less => &minus_z,
                    std::cmp::Ordering::Equal => &pauli::lowering(),
                    std::cmp::Ordering::Greater => &pauli::identity(),
                };
                m = m.kronecker(local);
            }
            Ok(ComplexOperator::from_parts(m, chain.basis()))
        })
        .collect()
}

/// Largest violation of `{c_i, c_j†} = δ_ij` and `{c_i, c_j} = 0`.
pub fn car_defect(ops: &[ComplexOperator]) -> f64 {
    let mut worst = 0.0f64;
    for (i, ci) in ops.iter().enumerate() {
        for (j, cj) in ops.iter().enumerate() {
            let (a, b) = (ci.matrix(), cj.matrix());
            let bd = b.adjoint();
            let mut mixed = a * &bd + &bd * a;
            if i == j {
                mixed -= DMatrix::<C64>::identity(a.nrows(), a.nrows());
            }
            let pure = a * b + b * a;
            worst = worst.max(max_abs(&mixed)).max(max_abs(&pure));
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct XxChainSolution {
    pub length: usize,
    pub coupling: f64,
    /// Sorted many-body eigenvalues of the spin Hamiltonian.
    pub many_body: Vec<f64>,
    /// Sorted eigenvalues of the `L×L` hopping matrix.
    pub single_particle: Vec<f64>,
    pub ground_energy: f64,
    /// Largest gap between the spin spectrum and the sorted subset sums.
    pub max_deviation: f64,
    pub verified: bool,
}

/// `H = (J/4) Σ (σ⁺_i σ⁻_{i+1} + σ⁻_i σ⁺_{i+1})`, open chain.
pub fn xx_hamiltonian(chain: &SpinChain, coupling: f64) -> ComplexOperator {
    let d = chain.dim();
    let mut h = DMatrix::<C64>::zeros(d, d);
    let (up, down) = (pauli::raising(), pauli::lowering());
    for i in 0..chain.len().saturating_sub(1) {
        let a = chain.site_operator(i, &up).into_matrix() * chain.site_operator(i + 1, &down).into_matrix();
        h += &a + a.adjoint();
    }
    ComplexOperator::from_parts(h * C64::from(coupling / 4.0), chain.basis())
}

/// Multiset of `Σ_{k∈S} ε_k` over all subsets `S`, sorted.
pub fn subset_sums(levels: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0];
    for &e in levels {
        let with: Vec<f64> = sums.iter().map(|s| s + e).collect();
        sums.extend(with);
    }
    sums.sort_by(f64::total_cmp);
    sums
}

/// Exact diagonalization of the XX chain checked against the free-fermion
/// subset sums of the hopping spectrum (`h_{i,i+1} = J/4`).
pub fn solve_xx_chain(length: usize, coupling: f64) -> Result<XxChainSolution> {
    let chain = SpinChain::new(length)?;
    if length < 2 {
        return Err(Error::InvalidArgument("XX chain needs at least two sites".into()));
    }
    if !coupling.is_finite() {
        return Err(Error::InvalidArgument(format!("coupling {coupling} is not finite")));
    }
    let h = xx_hamiltonian(&chain, coupling);
    let many_body = h.hermitian_eigenvalues();
    let hop = DMatrix::<f64>::from_fn(length, length, |i, j| if i.abs_diff(j) == 1 { coupling / 4.0 } else { 0.0 });
    let mut single_particle: Vec<f64> = hop.symmetric_eigenvalues().iter().copied().collect();
    single_particle.sort_by(f64::total_cmp);
    let sums = subset_sums(&single_particle);
    let max_deviation = many_body.iter().zip(&sums).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(XxChainSolution {
        length,
        coupling,
        ground_energy: many_body[0],
        verified: max_deviation < 1e-9,
        many_body,
        single_particle,
        max_deviation,
    })
}

/// Spin operators on `2j + 1` states ordered `m = j, j−1, …, −j`.
#[derive(Debug, Clone)]
pub struct SpinMatrices {
    pub plus: ComplexOperator,
    pub minus: ComplexOperator,
    pub z: ComplexOperator,
}

impl SpinMatrices {
    pub fn dim(&self) -> usize {
        self.z.dim()
    }

    /// `J_z² + (J₊J₋ + J₋J₊)/2`.
    pub fn casimir(&self) -> DMatrix<C64> {
        let (p, m, z) = (self.plus.matrix(), self.minus.matrix(), self.z.matrix());
        z * z + (p * m + m * p) * C64::from(0.5)
    }

    /// `max(‖[J₊,J₋] − 2J_z‖, ‖[J_z,J₊] − J₊‖, ‖[J_z,J₋] + J₋‖)`.
    pub fn closure_defect(&self) -> f64 {
        let (p, m, z) = (self.plus.matrix(), self.minus.matrix(), self.z.matrix());
        let a = p * m - m * p - z * C64::from(2.0);
        let b = z * p - p * z - p;
        let c = z * m - m * z + m;
        max_abs(&a).max(max_abs(&b)).max(max_abs(&c))
    }
}

fn two_j(j: f64) -> Result<usize> {
    let tj = 2.0 * j;
    if !tj.is_finite() || tj.fract() != 0.0 || tj < 1.0 || tj + 1.0 > 64.0 {
        return Err(Error::NonHalfIntegerSpin(tj));
    }
    Ok(tj as usize)
}

/// Spin matrices from `⟨m+1|S⁺|m⟩ = √((j−m)(j+m+1))`.
pub fn ladder_spin_matrices(j: f64) -> Result<SpinMatrices> {
    let d = two_j(j)? + 1;
    let m_of = |k: usize| j - k as f64;
    let mut plus = DMatrix::<C64>::zeros(d, d);
    let mut z = DMatrix::<C64>::zeros(d, d);
    for k in 0..d {
        let m = m_of(k);
        z[(k, k)] = C64::from(m);
        if k > 0 {
            plus[(k - 1, k)] = C64::from(((j - m) * (j + m + 1.0)).sqrt());
        }
    }
    let tag = BasisTag::Generic(d);
    Ok(SpinMatrices {
        minus: ComplexOperator::from_parts(plus.adjoint(), tag.clone()),
        plus: ComplexOperator::from_parts(plus, tag.clone()),
        z: ComplexOperator::from_parts(z, tag),
    })
}

/// Holstein-Primakoff: `S⁺ = √(2j − b†b) b`, `S_z = j − b†b`, with boson
/// number `n = j − m` truncated at `2j`.
pub fn holstein_primakoff(j: f64) -> Result<SpinMatrices> {
    let tj = two_j(j)?;
    let d = tj + 1;
    let b = annihilation_matrix(d);
    let root = DMatrix::<C64>::from_fn(d, d, |r, c| if r == c { C64::from(((tj - r) as f64).sqrt()) } else { ZERO });
    let number = DMatrix::<C64>::from_fn(d, d, |r, c| if r == c { C64::from(r as f64) } else { ZERO });
    let plus = root * &b;
    let z = DMatrix::<C64>::identity(d, d) * C64::from(j) - number;
    let tag = BasisTag::Generic(d);
    Ok(SpinMatrices {
        minus: ComplexOperator::from_parts(plus.adjoint(), tag.clone()),
        plus: ComplexOperator::from_parts(plus, tag.clone()),
        z: ComplexOperator::from_parts(z, tag),
    })
}

/// Dyson-Maleev: `J₊ = a`, `J₋ = a†(2s − a†a)`, `J_z = s − a†a` on `2s + 1`
/// states. Not Hermitian-conjugate pairs, but the same algebra.
pub fn dyson_maleev(j: f64) -> Result<SpinMatrices> {
    let tj = two_j(j)?;
    let d = tj + 1;
    let a = annihilation_matrix(d);
    let number = DMatrix::<C64>::from_fn(d, d, |r, c| if r == c { C64::from(r as f64) } else { ZERO });
    let id = DMatrix::<C64>::identity(d, d);
    let minus = a.adjoint() * (&id * C64::from(tj as f64) - &number);
    let z = id * C64::from(j) - number;
    let tag = BasisTag::Generic(d);
    Ok(SpinMatrices {
        plus: ComplexOperator::from_parts(a, tag.clone()),
        minus: ComplexOperator::from_parts(minus, tag.clone()),
        z: ComplexOperator::from_parts(z, tag),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovBoson {
    pub r: f64,
    pub u: f64,
    pub v: f64,
    pub quasiparticle_gap: f64,
    /// `√(E² − g²) − E`.
    pub ground_energy: f64,
    /// Lowest numerically found levels of the two-mode Hamiltonian.
    pub low_levels: Vec<f64>,
    /// Largest deviation of the lowest five levels (with multiplicity) from
    /// `E₀ + k√(E² − g²)`.
    pub spacing_error: f64,
}

/// Two-mode squeezing Hamiltonian `E(n₊ + n₋) + g(a₊a₋ + h.c.)` on a
/// truncated Fock space, diagonalized and compared with the Bogoliubov
/// spectrum.
pub fn bogoliubov_boson(e: f64, g: f64, cutoff: usize) -> Result<BogoliubovBoson> {
    if !(e > 0.0) || !g.is_finite() {
        return Err(Error::InvalidArgument(format!("need E > 0 and finite g, got E = {e}, g = {g}")));
    }
    if g.abs() >= e {
        return Err(Error::UnstablePairing { e, g });
    }
    if cutoff < 6 {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff} too small to resolve five levels")));
    }
    let r = 0.5 * (g / e).atanh();
    let gap = (e * e - g * g).sqrt();
    let e0 = gap - e;

    // n₊ − n₋ is conserved; each block is a real tridiagonal matrix in
    // |n₋ + d, n₋⟩. Levels k ≤ 4 live in blocks |d| ≤ 4, and block d starts
    // at E₀ + |d|·gap, so |d| ≤ 5 covers the lowest fifteen states.
    let mut levels = Vec::new();
    for d in -5i64..=5 {
        let shift = d.unsigned_abs() as usize;
        if shift >= cutoff {
            continue;
        }
        let size = cutoff - shift;
        let block = DMatrix::<f64>::from_fn(size, size, |i, k| {
            // State i: smaller occupation i, larger i + shift.
            if i == k {
                e * (2 * i + shift) as f64
            } else if i.abs_diff(k) == 1 {
                let m = i.min(k) + 1;
                g * ((m * (m + shift)) as f64).sqrt()
            } else {
                0.0
            }
        });
        levels.extend(block.symmetric_eigenvalues().iter().copied());
    }
    levels.sort_by(f64::total_cmp);
    let mut expected = Vec::new();
    for k in 0..5 {
        expected.extend(std::iter::repeat_n(e0 + k as f64 * gap, k + 1));
    }
    let low: Vec<f64> = levels.into_iter().take(expected.len()).collect();
    let spacing_error = low.iter().zip(&expected).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(BogoliubovBoson {
        r,
        u: r.cosh(),
        v: r.sinh(),
        quasiparticle_gap: gap,
        ground_energy: e0,
        low_levels: low,
        spacing_error,
    })
}

/// `γ₁ = u a₁ − v a₂†`, `γ₂ = u a₂† + v a₁` on two fermion modes, without the
/// canonicality check.
pub fn fermion_pair_operators(u: f64, v: f64) -> [ComplexOperator; 2] {
    let chain = SpinChain::new(2).expect("two sites");
    let a = jordan_wigner_ops(&chain).expect("two sites");
    let (a1, a2) = (a[0].matrix(), a[1].matrix());
    let g1 = a1 * C64::from(u) - a2.adjoint() * C64::from(v);
    let g2 = a2.adjoint() * C64::from(u) + a1 * C64::from(v);
    [
        ComplexOperator::from_parts(g1, chain.basis()),
        ComplexOperator::from_parts(g2, chain.basis()),
    ]
}

/// Fermionic Bogoliubov quasiparticles for real `u² + v² = 1`.
pub fn bogoliubov_fermion(u: f64, v: f64) -> Result<[ComplexOperator; 2]> {
    let defect = u * u + v * v - 1.0;
    if !(defect.abs() <= 1e-12) {
        return Err(Error::NotCanonical(defect));
    }
    Ok(fermion_pair_operators(u, v))
}

/// Two-mode ladder operators `(a₁, a₂)` with `cutoff` levels per mode.
pub fn two_mode_ladders(cutoff: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let a = annihilation_matrix(cutoff);
    let id = DMatrix::<C64>::identity(cutoff, cutoff);
    (a.kronecker(&id), id.kronecker(&a))
}

/// Indices of two-mode states `|n₁, n₂⟩` with `n₁ + n₂ ≤ max_total`.
pub fn number_block(cutoff: usize, max_total: usize) -> Vec<usize> {
    (0..cutoff * cutoff).filter(|k| k / cutoff + k % cutoff <= max_total).collect()
}

/// Jordan-Schwinger map `JS(M) = Σ_ij a_i† M_ij a_j`.
pub fn jordan_schwinger(m: &DMatrix<C64>, cutoff: usize) -> Result<ComplexOperator> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::DimMismatch(format!("need a 2x2 matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    if cutoff < 4 {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff} below the minimum of 4")));
    }
    let (a1, a2) = two_mode_ladders(cutoff);
    let ops = [a1, a2];
    let d = cutoff * cutoff;
    let mut out = DMatrix::<C64>::zeros(d, d);
    for i in 0..2 {
        for j in 0..2 {
            if m[(i, j)] != ZERO {
                out += ops[i].adjoint() * &ops[j] * m[(i, j)];
            }
        }
    }
    let tag = BasisTag::Tensor(Box::new(BasisTag::Fock(cutoff)), Box::new(BasisTag::Fock(cutoff)));
    Ok(ComplexOperator::from_parts(out, tag))
}

/// Restriction of a two-mode operator to the given states.
pub fn restrict(op: &DMatrix<C64>, states: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(states.len(), states.len(), |i, j| op[(states[i], states[j])])
}

/// Eigenvalues of `JS(M)` on the sector `n₁ + n₂ = total` (requires a Hermitian `M`).
pub fn jordan_schwinger_sector_spectrum(m: &DMatrix<C64>, cutoff: usize, total: usize) -> Result<Vec<f64>> {
    let js = jordan_schwinger(m, cutoff)?;
    let states: Vec<usize> = (0..cutoff * cutoff).filter(|k| k / cutoff + k % cutoff == total).collect();
    Ok(hermitian_eigenvalues(&restrict(js.matrix(), &states)))
}

/// `2×2` Pauli matrices scaled by one half (spin-1/2 generators).
pub fn half_paulis() -> [DMatrix<C64>; 3] {
    let h = C64::from(0.5);
    [pauli::x() * h, pauli::y() * h, pauli::z() * h]
}
