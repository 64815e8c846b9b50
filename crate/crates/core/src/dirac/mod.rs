//! Relativistic applications: the 4×4 Dirac algebra, Foldy-Wouthuysen
//! decoupling, the weak-field energy series with an anomalous moment, and
//! the susceptibility integrals and magnetic translations in submodules.
//!
//! Reduced units throughout: ħ = c = 1 and the rest energy Δ = mc² = 1
//! unless a mass is passed explicitly; the charge is absorbed into B.

pub mod magnetic;
pub mod susceptibility;

pub use magnetic::{magnetic_translation, Flux};
pub use susceptibility::{chi_components, ChiComponents, SusceptibilityInput};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::{pauli, BasisTag, ComplexOperator, C64, ZERO};

/// Momentum three-vector.
pub type Vec3 = [f64; 3];

/// β and α in the Dirac representation (β diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct DiracMatrices {
    pub beta: ComplexOperator,
    pub alpha_x: ComplexOperator,
    pub alpha_y: ComplexOperator,
    pub alpha_z: ComplexOperator,
}

fn block(tl: &DMatrix<C64>, tr: &DMatrix<C64>, bl: &DMatrix<C64>, br: &DMatrix<C64>) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(4, 4, ZERO);
    m.view_mut((0, 0), (2, 2)).copy_from(tl);
    m.view_mut((0, 2), (2, 2)).copy_from(tr);
    m.view_mut((2, 0), (2, 2)).copy_from(bl);
    m.view_mut((2, 2), (2, 2)).copy_from(br);
    m
}

impl DiracMatrices {
    pub fn new() -> Self {
        let z2 = DMatrix::from_element(2, 2, ZERO);
        let i2 = pauli::identity();
        let beta = block(&i2, &z2, &z2, &(-i2.clone()));
        let alpha = |s: DMatrix<C64>| block(&z2, &s, &s, &z2);
        let wrap = |m| ComplexOperator::from_parts(m, BasisTag::Dirac4);
        Self {
            beta: wrap(beta),
            alpha_x: wrap(alpha(pauli::x())),
            alpha_y: wrap(alpha(pauli::y())),
            alpha_z: wrap(alpha(pauli::z())),
        }
    }

    pub fn alphas(&self) -> [&ComplexOperator; 3] {
        [&self.alpha_x, &self.alpha_y, &self.alpha_z]
    }

    /// α·k as a matrix.
    pub fn alpha_dot(&self, k: Vec3) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(4, 4, ZERO);
        for (a, kc) in self.alphas().iter().zip(k) {
            m += a.matrix() * C64::from(kc);
        }
        m
    }

    /// Largest deviation from β² = I, {α_μ, β} = 0 and {α_μ, α_ν} = 2δI.
    pub fn clifford_defect(&self) -> f64 {
        let id = DMatrix::<C64>::identity(4, 4);
        let b = self.beta.matrix();
        let mut worst = crate::operator::max_abs(&(b * b - &id));
        let al = self.alphas();
        for (mu, a) in al.iter().enumerate() {
            let a = a.matrix();
            worst = worst.max(crate::operator::max_abs(&(a * b + b * a)));
            for (nu, c) in al.iter().enumerate() {
                let c = c.matrix();
                let target = if mu == nu { &id * C64::from(2.0) } else { DMatrix::from_element(4, 4, ZERO) };
                worst = worst.max(crate::operator::max_abs(&(a * c + c * a - target)));
            }
        }
        worst
    }
}

impl Default for DiracMatrices {
    fn default() -> Self {
        Self::new()
    }
}

fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("mass must be positive and finite, got {m}")))
    }
}

fn check_momentum(k: Vec3) -> Result<()> {
    if k.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument("momentum must be finite".into()))
    }
}

/// Relativistic energy √(m² + k²).
pub fn energy(k: Vec3, m: f64) -> f64 {
    (m * m + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
}

/// H = βm + α·k.
pub fn dirac_hamiltonian(k: Vec3, m: f64) -> Result<ComplexOperator> {
    check_mass(m)?;
    check_momentum(k)?;
    let d = DiracMatrices::new();
    let h = d.beta.matrix() * C64::from(m) + d.alpha_dot(k);
    Ok(ComplexOperator::from_parts(h, BasisTag::Dirac4))
}

/// Foldy-Wouthuysen unitary S = (E + m + βα·k)/√(2E(E+m)), which brings
/// H to the even form S H S† = βE.
pub fn fw_unitary(k: Vec3, m: f64) -> Result<ComplexOperator> {
    check_mass(m)?;
    check_momentum(k)?;
    let e = energy(k, m);
    let d = DiracMatrices::new();
    let id = DMatrix::<C64>::identity(4, 4);
    let s = (id * C64::from(e + m) + d.beta.matrix() * d.alpha_dot(k))
        / C64::from((2.0 * e * (e + m)).sqrt());
    Ok(ComplexOperator::from_parts(s, BasisTag::Dirac4))
}

/// Result of decoupling one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwCheck {
    pub energy: f64,
    /// max |S H S† − βE|.
    pub even_form_defect: f64,
    /// Largest entry of the off-diagonal 2×2 blocks of S H S†.
    pub odd_part: f64,
    pub unitarity_defect: f64,
    /// cos of the rotation angle read off S, to be compared with m/E.
    pub rotation_cosine: f64,
}

pub fn fw_check(k: Vec3, m: f64) -> Result<FwCheck> {
    let h = dirac_hamiltonian(k, m)?;
    let s = fw_unitary(k, m)?;
    let e = energy(k, m);
    let even = s.matrix() * h.matrix() * s.matrix().adjoint();
    let target = DiracMatrices::new().beta.matrix() * C64::from(e);
    let mut odd = 0.0f64;
    for r in 0..4 {
        for c in 0..4 {
            if (r < 2) != (c < 2) {
                odd = odd.max(even[(r, c)].norm());
            }
        }
    }
    // S = cos(θ/2) + β α·k̂ sin(θ/2), so Tr S / 4 = cos(θ/2).
    let half = s.trace().re / 4.0;
    Ok(FwCheck {
        energy: e,
        even_form_defect: crate::operator::max_abs(&(even - target)),
        odd_part: odd,
        unitarity_defect: s.unitarity_defect(),
        rotation_cosine: 2.0 * half * half - 1.0,
    })
}

fn check_sign(name: &str, s: i8) -> Result<f64> {
    match s {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        _ => Err(Error::InvalidArgument(format!("{name} must be +1 or -1, got {s}"))),
    }
}

/// Weak-field energy through O(B²) with B along z (m = 1):
///
/// E − λ′s k⊥B/(2E) − (1+λ′)sB/(2E) − (1+λ′)²B²/(8E³) + ε²B²(1 + λ′²E²)/(8E⁵),
///
/// where ε² = 1 + k_z². The magnetodynamic term uses the eigenvalue ±k⊥ of
/// (σ×k)_z on the same spin branch. Returns `band_sign` times the value.
pub fn energy_with_field(k: Vec3, b: f64, lambda_prime: f64, spin_sign: i8, band_sign: i8) -> Result<f64> {
    check_momentum(k)?;
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("field must be non-negative, got {b}")));
    }
    let s = check_sign("spin_sign", spin_sign)?;
    let band = check_sign("band_sign", band_sign)?;
    let e = energy(k, 1.0);
    let k_perp = (k[0] * k[0] + k[1] * k[1]).sqrt();
    let g = 1.0 + lambda_prime;
    let value = e
        - lambda_prime * s * k_perp * b / (2.0 * e)
        - g * s * b / (2.0 * e)
        - g * g * b * b / (8.0 * e.powi(3))
        + spread_coefficient(k, lambda_prime) * b * b / 8.0;
    Ok(band * value)
}

// ε²(1 + λ′²E²)/E⁵, shared by the moment and the spread.
fn spread_coefficient(k: Vec3, lambda_prime: f64) -> f64 {
    let e = energy(k, 1.0);
    let eps2 = 1.0 + k[2] * k[2];
    eps2 * (1.0 + lambda_prime * lambda_prime * e * e) / e.powi(5)
}

/// Induced moment M = −ε²(1 + λ′²E²)B/(4E⁵) from the spread part of the
/// second-order energy.
pub fn induced_moment(k: Vec3, b: f64, lambda_prime: f64) -> Result<f64> {
    check_momentum(k)?;
    Ok(-spread_coefficient(k, lambda_prime) * b / 4.0)
}

/// ⟨r²⟩ = ε²(1 + λ′²E²)/E⁵ in Compton units, from M = −B⟨r²⟩/4.
pub fn charge_spread(k: Vec3, lambda_prime: f64) -> Result<f64> {
    check_momentum(k)?;
    Ok(spread_coefficient(k, lambda_prime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::anticommutator;
    use crate::testutil::rng;
    use rand::Rng;

    #[test]
    fn clifford_relations() {
        let d = DiracMatrices::new();
        assert_eq!(d.clifford_defect(), 0.0);
        let b = d.beta.matrix();
        for a in d.alphas() {
            // β α β = −α exactly.
            assert_eq!(b * a.matrix() * b, -a.matrix());
            let ac = anticommutator(a, &d.beta).unwrap();
            assert_eq!(ac.max_abs(), 0.0);
        }
    }

    #[test]
    fn hamiltonian_spectrum() {
        let h = dirac_hamiltonian([0.0; 3], 1.5).unwrap();
        assert_eq!(h.hermitian_eigenvalues(), vec![-1.5, -1.5, 1.5, 1.5]);
        let h = dirac_hamiltonian([3.0, 0.0, 0.0], 4.0).unwrap();
        let ev = h.hermitian_eigenvalues();
        for (v, t) in ev.iter().zip([-5.0, -5.0, 5.0, 5.0]) {
            assert!((v - t).abs() < 1e-12);
        }
        assert!(h.trace().norm() < 1e-15);
        assert!(dirac_hamiltonian([0.0; 3], 0.0).is_err());
    }

    #[test]
    fn fw_examples() {
        let s = fw_unitary([0.0; 3], 1.0).unwrap();
        assert!(s.max_diff(&ComplexOperator::identity(BasisTag::Dirac4)) < 1e-15);
        let c = fw_check([3.0, 0.0, 0.0], 4.0).unwrap();
        assert!(c.even_form_defect < 1e-12);
        assert!((c.rotation_cosine - 0.8).abs() < 1e-14);
    }

    #[test]
    fn fw_random_momenta() {
        let mut r = rng(12);
        for _ in 0..1000 {
            let k = [r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0)];
            let m = r.gen_range(0.1..3.0);
            let c = fw_check(k, m).unwrap();
            assert!(c.even_form_defect < 1e-12, "{k:?} {m} {}", c.even_form_defect);
            assert!(c.odd_part < 1e-11);
            assert!(c.unitarity_defect < 1e-12);
            assert!((c.rotation_cosine - m / c.energy).abs() < 1e-12);
        }
    }

    #[test]
    fn field_series() {
        for band in [1i8, -1] {
            let e = energy_with_field([0.3, 0.4, 1.2], 0.0, 0.1, 1, band).unwrap();
            assert_eq!(e, f64::from(band) * energy([0.3, 0.4, 1.2], 1.0));
        }
        // k ∥ B: the magnetodynamic term drops out for any λ′.
        let k = [0.0, 0.0, 0.7];
        let up = energy_with_field(k, 0.01, 0.3, 1, 1).unwrap();
        let e = energy(k, 1.0);
        let expect = e - 1.3 * 0.01 / (2.0 * e) - 1.69 * 1e-4 / (8.0 * e.powi(3))
            + (1.49) * (1.0 + 0.09 * e * e) * 1e-4 / (8.0 * e.powi(5));
        assert!((up - expect).abs() < 1e-15);
        // The spread part of E⁽²⁾ reproduces the induced moment: M = −2E⁽²⁾_sp B.
        let k = [0.2, -0.1, 0.5];
        let b = 1e-3;
        let lp = 0.00116;
        let second = (energy_with_field(k, b, lp, 1, 1).unwrap() + energy_with_field(k, b, lp, -1, 1).unwrap()) / 2.0;
        let e = energy(k, 1.0);
        let sp = second - e + (1.0 + lp).powi(2) * b * b / (8.0 * e.powi(3));
        let m = induced_moment(k, b, lp).unwrap();
        assert!((m + 2.0 * sp / b).abs() < 1e-12);
        assert!(energy_with_field(k, -1.0, 0.0, 1, 1).is_err());
        assert!(energy_with_field(k, 1.0, 0.0, 2, 1).is_err());
    }

    #[test]
    fn charge_spread_values() {
        assert_eq!(charge_spread([0.0; 3], 0.0).unwrap(), 1.0);
        let lp = 0.00116;
        assert!((charge_spread([0.0; 3], lp).unwrap() - (1.0 + lp * lp)).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let k = i as f64 * 0.05;
            let r2 = charge_spread([k / 3f64.sqrt(); 3], 0.0).unwrap();
            assert!(r2 < last);
            last = r2;
        }
    }
}
