//! Finite Grassmann algebras and Berezin integration.
//!
//! An element is a map from generator subsets (bitmasks, generator `i` at bit
//! `i`) to complex coefficients; each mask stands for the product of its
//! generators in ascending order. Integration follows `∫dθ 1 = 0`,
//! `∫dθ θ = 1` with `dθ` acting from the left, and multiple integrals
//! `∫dθ_a dθ_b … F` are done innermost (rightmost) first.
//!
//! [`SuperOperator`] carries Grassmann-valued operators on a fermionic Fock
//! space. Grassmann generators anticommute with fermion creation and
//! annihilation operators, which is tracked through the parity of Fock states.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::{C64, I, ONE, ZERO};

pub const MAX_GENERATORS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrassmannAlgebra {
    names: Vec<String>,
}

impl GrassmannAlgebra {
    /// Algebra with generators named `θ_1 … θ_n`.
    pub fn new(n: usize) -> Result<Arc<Self>> {
        Self::with_names((1..=n).map(|i| format!("θ_{i}")).collect())
    }

    pub fn with_names(names: Vec<String>) -> Result<Arc<Self>> {
        if names.len() > MAX_GENERATORS {
            return Err(Error::TooManyGenerators(names.len()));
        }
        Ok(Arc::new(Self { names }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }
}

/// Sign of `θ^a θ^b` relative to the ascending product of `a | b`, or `None`
/// when the masks overlap.
#[inline]
pub fn merge_sign(a: u32, b: u32) -> Option<f64> {
    if a & b != 0 {
        return None;
    }
    // Count pairs (i in a, j in b) with i > j.
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if swaps.is_multiple_of(2) { 1.0 } else { -1.0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannElement {
    alg: Arc<GrassmannAlgebra>,
    terms: BTreeMap<u32, C64>,
}

impl GrassmannElement {
    pub fn zero(alg: &Arc<GrassmannAlgebra>) -> Self {
        Self { alg: alg.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(alg: &Arc<GrassmannAlgebra>, c: C64) -> Self {
        Self::monomial(alg, 0, c)
    }

    pub fn one(alg: &Arc<GrassmannAlgebra>) -> Self {
        Self::scalar(alg, ONE)
    }

    pub fn generator(alg: &Arc<GrassmannAlgebra>, i: usize) -> Result<Self> {
        if i >= alg.len() {
            return Err(Error::InvalidArgument(format!("generator {i} outside an algebra of {}", alg.len())));
        }
        Ok(Self::monomial(alg, 1 << i, ONE))
    }

    /// `c` times the ascending product of the generators in `mask`.
    pub fn monomial(alg: &Arc<GrassmannAlgebra>, mask: u32, c: C64) -> Self {
        let mut terms = BTreeMap::new();
        if c != ZERO {
            terms.insert(mask, c);
        }
        Self { alg: alg.clone(), terms }
    }

    pub fn algebra(&self) -> &Arc<GrassmannAlgebra> {
        &self.alg
    }

    pub fn terms(&self) -> &BTreeMap<u32, C64> {
        &self.terms
    }

    pub fn coefficient(&self, mask: u32) -> C64 {
        self.terms.get(&mask).copied().unwrap_or(ZERO)
    }

    pub fn scalar_part(&self) -> C64 {
        self.coefficient(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &other.alg) || self.alg == other.alg {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    fn insert(terms: &mut BTreeMap<u32, C64>, mask: u32, c: C64) {
        let e = terms.entry(mask).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            terms.remove(&mask);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        let mut terms = self.terms.clone();
        for (&m, &c) in &other.terms {
            Self::insert(&mut terms, m, c);
        }
        Ok(Self { alg: self.alg.clone(), terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: C64) -> Self {
        let terms = if c == ZERO {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(&m, &v)| (m, v * c)).filter(|(_, v)| *v != ZERO).collect()
        };
        Self { alg: self.alg.clone(), terms }
    }

    /// Graded product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        let mut terms = BTreeMap::new();
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                if let Some(s) = merge_sign(a, b) {
                    Self::insert(&mut terms, a | b, ca * cb * s);
                }
            }
        }
        Ok(Self { alg: self.alg.clone(), terms })
    }

    /// `exp(x)` as a finite Taylor sum; a scalar part `c` contributes `e^c`.
    pub fn exp_nilpotent(&self) -> Self {
        let c = self.scalar_part();
        let mut nil = self.clone();
        nil.terms.remove(&0);
        let mut sum = Self::one(&self.alg);
        let mut power = Self::one(&self.alg);
        for k in 1..=self.alg.len() {
            power = power.multiply(&nil).expect("same algebra").scale(C64::from(1.0 / k as f64));
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power).expect("same algebra");
        }
        sum.scale(c.exp())
    }

    /// Left Berezin integral `∫dθ_k x`.
    pub fn berezin_integrate(&self, k: usize) -> Result<Self> {
        if k >= self.alg.len() {
            return Err(Error::InvalidArgument(format!("generator {k} outside an algebra of {}", self.alg.len())));
        }
        let bit = 1u32 << k;
        let below = bit - 1;
        let mut terms = BTreeMap::new();
        for (&m, &c) in &self.terms {
            if m & bit != 0 {
                // Bring θ_k to the front past the generators that precede it.
                let sign = if (m & below).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                Self::insert(&mut terms, m & !bit, c * sign);
            }
        }
        Ok(Self { alg: self.alg.clone(), terms })
    }

    /// `∫dθ_{k_1} dθ_{k_2} … dθ_{k_r} x`, integrating `k_r` first.
    pub fn berezin_integrate_all(&self, measure: &[usize]) -> Result<Self> {
        measure.iter().rev().try_fold(self.clone(), |acc, &k| acc.berezin_integrate(k))
    }

    /// Left derivative `∂/∂θ_k`, computed by locating `θ_k` inside each
    /// ascending monomial.
    pub fn left_derivative(&self, k: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (&m, &c) in &self.terms {
            if m >> k & 1 == 1 {
                let position = (0..k).filter(|&i| m >> i & 1 == 1).count();
                let sign = if position % 2 == 0 { 1.0 } else { -1.0 };
                Self::insert(&mut terms, m ^ (1 << k), c * sign);
            }
        }
        Self { alg: self.alg.clone(), terms }
    }

    /// Replaces generator `k` by the odd element `y` everywhere.
    pub fn substitute(&self, k: usize, y: &Self) -> Result<Self> {
        self.same_algebra(y)?;
        let bit = 1u32 << k;
        let mut out = Self::zero(&self.alg);
        for (&m, &c) in &self.terms {
            if m & bit == 0 {
                out = out.add(&Self::monomial(&self.alg, m, c))?;
            } else {
                let left = Self::monomial(&self.alg, m & (bit - 1), c);
                let right = Self::monomial(&self.alg, m & !((bit << 1) - 1), ONE);
                out = out.add(&left.multiply(y)?.multiply(&right)?)?;
            }
        }
        Ok(out)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if m != 0 {
                write!(f, " *")?;
                for g in 0..self.alg.len() {
                    if m >> g & 1 == 1 {
                        write!(f, " {}", self.alg.name(g))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// `∫ Π dθ̄_i dθ_i exp(−Σ θ̄_i A_ij θ_j)` with measure `dθ̄_n dθ_n … dθ̄_1 dθ_1`,
/// evaluated symbolically. Equals `det A`.
pub fn gaussian_berezin(a: &DMatrix<C64>) -> Result<C64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimMismatch(format!("{}x{} matrix", n, a.ncols())));
    }
    if 2 * n > MAX_GENERATORS {
        return Err(Error::TooManyGenerators(2 * n));
    }
    // θ̄_i is generator 2i, θ_i is generator 2i + 1.
    let alg = GrassmannAlgebra::with_names((0..n).flat_map(|i| [format!("θ̄_{}", i + 1), format!("θ_{}", i + 1)]).collect())?;
    let mut action = GrassmannElement::zero(&alg);
    for i in 0..n {
        for j in 0..n {
            let bar = GrassmannElement::generator(&alg, 2 * i)?;
            let th = GrassmannElement::generator(&alg, 2 * j + 1)?;
            action = action.add(&bar.multiply(&th)?.scale(-a[(i, j)]))?;
        }
    }
    let measure: Vec<usize> = (0..n).rev().flat_map(|i| [2 * i, 2 * i + 1]).collect();
    Ok(action.exp_nilpotent().berezin_integrate_all(&measure)?.scalar_part())
}

/// Grassmann-valued operator on a fermionic Fock space: mask → matrix.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    alg: Arc<GrassmannAlgebra>,
    parity: Arc<Vec<bool>>,
    terms: BTreeMap<u32, DMatrix<C64>>,
}

impl SuperOperator {
    /// `1 ⊗ m`. `parity[i]` is the fermion-number parity of basis state `i`.
    pub fn from_matrix(alg: &Arc<GrassmannAlgebra>, parity: &Arc<Vec<bool>>, m: DMatrix<C64>) -> Self {
        Self::term(alg, parity, 0, m)
    }

    /// `θ^mask ⊗ m`.
    pub fn term(alg: &Arc<GrassmannAlgebra>, parity: &Arc<Vec<bool>>, mask: u32, m: DMatrix<C64>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(mask, m);
        Self { alg: alg.clone(), parity: parity.clone(), terms }
    }

    fn dim(&self) -> usize {
        self.parity.len()
    }

    pub fn coefficient(&self, mask: u32) -> DMatrix<C64> {
        self.terms.get(&mask).cloned().unwrap_or_else(|| DMatrix::zeros(self.dim(), self.dim()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (&m, x) in &other.terms {
            terms.entry(m).and_modify(|e| *e += x).or_insert_with(|| x.clone());
        }
        Self { terms, ..self.clone() }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { terms: self.terms.iter().map(|(&m, x)| (m, x * c)).collect(), ..self.clone() }
    }

    /// `(θ^a A)(θ^b B) = ±θ^{a|b} Ã B` where `Ã` flips the sign of entries
    /// connecting states of opposite parity when `θ^b` is odd.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.alg != other.alg {
            return Err(Error::AlgebraMismatch);
        }
        let mut terms: BTreeMap<u32, DMatrix<C64>> = BTreeMap::new();
        for (&a, ma) in &self.terms {
            for (&b, mb) in &other.terms {
                let Some(s) = merge_sign(a, b) else { continue };
                let mut moved = ma.clone();
                if b.count_ones() % 2 == 1 {
                    for r in 0..moved.nrows() {
                        for c in 0..moved.ncols() {
                            if self.parity[r] != self.parity[c] {
                                moved[(r, c)] = -moved[(r, c)];
                            }
                        }
                    }
                }
                let prod = moved * mb * C64::from(s);
                terms.entry(a | b).and_modify(|e| *e += &prod).or_insert(prod);
            }
        }
        Ok(Self { terms, ..self.clone() })
    }

    /// Finite exponential series; terminates because every term of `self`
    /// carries at least one generator.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if self.terms.contains_key(&0) {
            return Err(Error::InvalidArgument("super-operator exponent must have no scalar part".into()));
        }
        let d = self.dim();
        let mut sum = Self::from_matrix(&self.alg, &self.parity, DMatrix::identity(d, d));
        let mut power = sum.clone();
        for k in 1..=self.alg.len() {
            power = power.multiply(self)?.scale(C64::from(1.0 / k as f64));
            sum = sum.add(&power);
        }
        Ok(sum)
    }

    pub fn berezin_integrate(&self, k: usize) -> Self {
        let bit = 1u32 << k;
        let mut terms: BTreeMap<u32, DMatrix<C64>> = BTreeMap::new();
        for (&m, x) in &self.terms {
            if m & bit != 0 {
                let sign = if (m & (bit - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                let v = x * C64::from(sign);
                terms.entry(m & !bit).and_modify(|e| *e += &v).or_insert(v);
            }
        }
        Self { terms, ..self.clone() }
    }

    pub fn berezin_integrate_all(&self, measure: &[usize]) -> Self {
        measure.iter().rev().fold(self.clone(), |acc, &k| acc.berezin_integrate(k))
    }

    /// Largest entry over all terms with a nonempty mask.
    pub fn max_soul(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(&m, _)| m != 0)
            .map(|(_, x)| crate::operator::max_abs(x))
            .fold(0.0, f64::max)
    }
}

/// Fermion modes realized on `2^n` states, with the vacuum index and state
/// parities read off the number operators.
struct FermionModes {
    a: Vec<DMatrix<C64>>,
    parity: Arc<Vec<bool>>,
    vacuum: usize,
}

fn fermion_modes(n_modes: usize) -> Result<FermionModes> {
    let chain = crate::transform::SpinChain::new(n_modes)?;
    let a: Vec<DMatrix<C64>> = crate::transform::jordan_wigner_ops(&chain)?.into_iter().map(|o| o.into_matrix()).collect();
    let dim = 1usize << n_modes;
    let occupation: Vec<usize> = (0..dim)
        .map(|i| a.iter().map(|ai| (ai.adjoint() * ai)[(i, i)].re.round() as usize).sum())
        .collect();
    let vacuum = occupation.iter().position(|&n| n == 0).expect("a vacuum exists");
    Ok(FermionModes { a, parity: Arc::new(occupation.iter().map(|n| n % 2 == 1).collect()), vacuum })
}

/// Resolution of the identity by fermionic coherent states,
/// `∫ Π dθ̄_i dθ_i e^{−Σθ̄θ} |θ⟩⟨θ|` with `|θ⟩ = exp(−Σ θ_i a_i†)|0⟩`.
/// Returns the largest deviation from the identity; `with_weight = false`
/// drops the Gaussian weight (a negative control).
pub fn fermion_cs_resolution_deviation(n_modes: usize, with_weight: bool) -> Result<f64> {
    if !(1..=MAX_GENERATORS / 2).contains(&n_modes) {
        return Err(Error::InvalidArgument(format!("n_modes = {n_modes} outside 1..={}", MAX_GENERATORS / 2)));
    }
    let modes = fermion_modes(n_modes)?;
    let dim = 1usize << n_modes;
    let alg = GrassmannAlgebra::with_names(
        (0..n_modes).flat_map(|i| [format!("θ̄_{}", i + 1), format!("θ_{}", i + 1)]).collect(),
    )?;
    let par = &modes.parity;
    let mut ket_gen = SuperOperator::term(&alg, par, 0, DMatrix::zeros(dim, dim));
    let mut bra_gen = ket_gen.clone();
    for (i, ai) in modes.a.iter().enumerate() {
        ket_gen = ket_gen.add(&SuperOperator::term(&alg, par, 1 << (2 * i + 1), -ai.adjoint()));
        bra_gen = bra_gen.add(&SuperOperator::term(&alg, par, 1 << (2 * i), ai.clone()));
    }
    ket_gen.terms.remove(&0);
    bra_gen.terms.remove(&0);
    let mut vac = DMatrix::zeros(dim, dim);
    vac[(modes.vacuum, modes.vacuum)] = ONE;
    let mut integrand = ket_gen
        .exp_nilpotent()?
        .multiply(&SuperOperator::from_matrix(&alg, par, vac))?
        .multiply(&bra_gen.exp_nilpotent()?)?;
    if with_weight {
        let mut w = GrassmannElement::zero(&alg);
        for i in 0..n_modes {
            let bar = GrassmannElement::generator(&alg, 2 * i)?;
            let th = GrassmannElement::generator(&alg, 2 * i + 1)?;
            w = w.sub(&bar.multiply(&th)?)?;
        }
        let w = w.exp_nilpotent();
        let mut weight = SuperOperator::term(&alg, par, 0, DMatrix::zeros(dim, dim));
        weight.terms.clear();
        for (&m, &c) in w.terms() {
            weight.terms.insert(m, DMatrix::identity(dim, dim) * c);
        }
        integrand = weight.multiply(&integrand)?;
    }
    let measure: Vec<usize> = (0..n_modes).rev().flat_map(|i| [2 * i, 2 * i + 1]).collect();
    let result = integrand.berezin_integrate_all(&measure);
    let body = result.coefficient(0) - DMatrix::<C64>::identity(dim, dim);
    Ok(crate::operator::max_abs(&body).max(result.max_soul()))
}

/// [`fermion_cs_resolution_deviation`] with the weight, for 1 or 2 modes.
pub fn fermion_cs_resolution_check(n_modes: usize) -> Result<f64> {
    if !(1..=2).contains(&n_modes) {
        return Err(Error::InvalidArgument(format!("n_modes must be 1 or 2, got {n_modes}")));
    }
    fermion_cs_resolution_deviation(n_modes, true)
}

/// Coefficient-wise deviation of `⟨𝔭|𝔮⟩` from `exp(i Σ 𝔭_i 𝔮_i)`, where
/// `|𝔮⟩ = exp(−Σ 𝔮_i a_i†)|0⟩` and `⟨𝔭| = ⟨0| exp(−i·sign Σ a_i 𝔭_i)`.
/// `sign = +1` is the consistent convention; `−1` is a negative control.
pub fn fermion_transition_deviation(n_modes: usize, sign: f64) -> Result<f64> {
    let modes = fermion_modes(n_modes)?;
    let dim = 1usize << n_modes;
    // 𝔭_i is generator 2i, 𝔮_i is generator 2i + 1.
    let alg = GrassmannAlgebra::with_names(
        (0..n_modes).flat_map(|i| [format!("p_{}", i + 1), format!("q_{}", i + 1)]).collect(),
    )?;
    let par = &modes.parity;
    let mut bra_gen = SuperOperator::term(&alg, par, 0, DMatrix::zeros(dim, dim));
    bra_gen.terms.clear();
    let mut ket_gen = bra_gen.clone();
    for (i, ai) in modes.a.iter().enumerate() {
        // a_i 𝔭_i = −𝔭_i ã_i with the parity-twisted ã_i; build it as a product.
        let a_op = SuperOperator::from_matrix(&alg, par, ai.clone());
        let p = SuperOperator::term(&alg, par, 1 << (2 * i), DMatrix::identity(dim, dim));
        bra_gen = bra_gen.add(&a_op.multiply(&p)?.scale(-I * sign));
        ket_gen = ket_gen.add(&SuperOperator::term(&alg, par, 1 << (2 * i + 1), -ai.adjoint()));
    }
    let amp = bra_gen.exp_nilpotent()?.multiply(&ket_gen.exp_nilpotent()?)?;
    let got: BTreeMap<u32, C64> = amp.terms.iter().map(|(&m, x)| (m, x[(modes.vacuum, modes.vacuum)])).collect();

    let mut pairing = GrassmannElement::zero(&alg);
    for i in 0..n_modes {
        let p = GrassmannElement::generator(&alg, 2 * i)?;
        let q = GrassmannElement::generator(&alg, 2 * i + 1)?;
        pairing = pairing.add(&p.multiply(&q)?.scale(I))?;
    }
    let want = pairing.exp_nilpotent();
    let mut dev = 0.0f64;
    for m in 0..(1u32 << alg.len()) {
        let g = got.get(&m).copied().unwrap_or(ZERO);
        dev = dev.max((g - want.coefficient(m)).norm());
    }
    Ok(dev)
}

/// Largest transition deviation over 1 and 2 modes.
pub fn fermion_transition_check() -> Result<f64> {
    Ok(fermion_transition_deviation(1, 1.0)?.max(fermion_transition_deviation(2, 1.0)?))
}
