//! Magnetic translations on a periodic L×L lattice with rational flux
//! p/q per plaquette.
//!
//! The gauge is Landau's, A = (0, Bx): with B = 2πp/q and q | L the hopping
//! phases are single-valued on the torus, which the symmetric gauge is not
//! for odd L/q multiples. On sites |x, y⟩ (index x + L·y):
//!
//! ```text
//! t_x|x,y⟩ = |x+1,y⟩,   t_y|x,y⟩ = e^{−iBx}|x,y+1⟩,
//! T(a) = e^{−i(B/2)a_x a_y} t_x^{a_x} t_y^{a_y},
//! T(a)T(b) = e^{iA(a)·b} T(a+b),   A(a)·b = (B/2)(a_x b_y − a_y b_x).
//! ```

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::{max_abs, BasisTag, ComplexOperator, C64, ZERO};

/// Flux per plaquette in units of the flux quantum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flux {
    p: i64,
    q: u64,
}

impl Flux {
    pub fn new(p: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("flux denominator must be positive".into()));
        }
        Ok(Self { p, q })
    }

    pub fn zero() -> Self {
        Self { p: 0, q: 1 }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// B = 2πp/q, the phase picked up around one plaquette.
    pub fn field(&self) -> f64 {
        2.0 * PI * self.p as f64 / self.q as f64
    }

    /// A(a)·b.
    pub fn composition_phase(&self, a: (i64, i64), b: (i64, i64)) -> f64 {
        0.5 * self.field() * (a.0 * b.1 - a.1 * b.0) as f64
    }
}

fn check_grid(l: usize, flux: Flux) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidArgument("grid side must be positive".into()));
    }
    if !(l as u64).is_multiple_of(flux.q) {
        return Err(Error::IncommensurateFlux { l, q: flux.q });
    }
    Ok(())
}

// Any integer displacement; the public constructor restricts |a_i| < L.
fn translation_matrix(l: usize, flux: Flux, a: (i64, i64)) -> DMatrix<C64> {
    let li = l as i64;
    let b = flux.field();
    let mut m = DMatrix::from_element(l * l, l * l, ZERO);
    for y in 0..li {
        for x in 0..li {
            let phase = -b * (0.5 * (a.0 * a.1) as f64 + (x * a.1) as f64);
            let to = (x + a.0).rem_euclid(li) + li * (y + a.1).rem_euclid(li);
            m[(to as usize, (x + li * y) as usize)] = C64::from_polar(1.0, phase);
        }
    }
    m
}

/// T(a) on the L×L torus.
pub fn magnetic_translation(l: usize, flux: Flux, a: (i64, i64)) -> Result<ComplexOperator> {
    check_grid(l, flux)?;
    let li = l as i64;
    if a.0.abs() >= li || a.1.abs() >= li {
        return Err(Error::InvalidArgument(format!("displacement {a:?} must have components below {l}")));
    }
    Ok(ComplexOperator::from_parts(translation_matrix(l, flux, a), BasisTag::Grid2D(l)))
}

/// Largest violations of the composition and commutator laws over all
/// displacement pairs with components in (−L, L).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationLaws {
    pub composition_defect: f64,
    pub commutator_defect: f64,
    pub inverse_defect: f64,
    pub pairs: usize,
}

pub fn translation_laws(l: usize, flux: Flux) -> Result<TranslationLaws> {
    check_grid(l, flux)?;
    let li = l as i64;
    let range: Vec<(i64, i64)> = (-(li - 1)..li).flat_map(|x| (-(li - 1)..li).map(move |y| (x, y))).collect();
    let ops: Vec<DMatrix<C64>> = range.iter().map(|&a| translation_matrix(l, flux, a)).collect();
    let id = DMatrix::<C64>::identity(l * l, l * l);
    let mut out = TranslationLaws { composition_defect: 0.0, commutator_defect: 0.0, inverse_defect: 0.0, pairs: 0 };
    for (i, &a) in range.iter().enumerate() {
        let neg = translation_matrix(l, flux, (-a.0, -a.1));
        out.inverse_defect = out.inverse_defect.max(max_abs(&(&ops[i] * neg - &id)));
        for (j, &b) in range.iter().enumerate() {
            let sum = translation_matrix(l, flux, (a.0 + b.0, a.1 + b.1));
            let ab = &ops[i] * &ops[j];
            let ba = &ops[j] * &ops[i];
            let phi = flux.composition_phase(a, b);
            let comp = &ab - &sum * C64::from_polar(1.0, phi);
            let comm = ab - ba - &sum * C64::new(0.0, 2.0 * phi.sin());
            out.composition_defect = out.composition_defect.max(max_abs(&comp));
            out.commutator_defect = out.commutator_defect.max(max_abs(&comm));
            out.pairs += 1;
        }
    }
    Ok(out)
}

/// The loop T(−x̂)T(−ŷ)T(x̂)T(ŷ) around one plaquette; equals e^{iB}·I.
pub fn plaquette_loop(l: usize, flux: Flux) -> Result<ComplexOperator> {
    check_grid(l, flux)?;
    let t = |a| translation_matrix(l, flux, a);
    let m = t((-1, 0)) * t((0, -1)) * t((1, 0)) * t((0, 1));
    Ok(ComplexOperator::from_parts(m, BasisTag::Grid2D(l)))
}

/// max |loop − e^{iB}·I|.
pub fn plaquette_defect(l: usize, flux: Flux) -> Result<f64> {
    let lp = plaquette_loop(l, flux)?;
    let target = DMatrix::<C64>::identity(l * l, l * l) * C64::from_polar(1.0, flux.field());
    Ok(max_abs(&(lp.matrix() - target)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_flux_commutes() {
        let f = Flux::zero();
        let a = magnetic_translation(3, f, (1, 2)).unwrap();
        let b = magnetic_translation(3, f, (2, -1)).unwrap();
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.max_diff(&b.compose(&a).unwrap()), 0.0);
        assert!(a.is_unitary(1e-15));
    }

    #[test]
    fn quarter_flux_laws() {
        let f = Flux::new(1, 4).unwrap();
        let laws = translation_laws(4, f).unwrap();
        assert_eq!(laws.pairs, 49 * 49);
        assert!(laws.composition_defect < 1e-12, "{laws:?}");
        assert!(laws.commutator_defect < 1e-12);
        assert!(laws.inverse_defect < 1e-12);
        assert!(plaquette_defect(4, f).unwrap() < 1e-12);
        let lp = plaquette_loop(4, f).unwrap();
        assert!((lp.get(5, 5) - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn brute_force_composition() {
        let f = Flux::new(1, 4).unwrap();
        let a = magnetic_translation(4, f, (1, 0)).unwrap();
        let b = magnetic_translation(4, f, (0, 1)).unwrap();
        let ab = magnetic_translation(4, f, (1, 1)).unwrap();
        let lhs = a.compose(&b).unwrap();
        let rhs = ab.scale(C64::from_polar(1.0, PI / 4.0));
        assert!(lhs.max_diff(&rhs) < 1e-15);
    }

    #[test]
    fn other_fluxes_and_errors() {
        for (p, q, l) in [(1, 3, 3), (2, 3, 6), (-1, 2, 4), (3, 5, 5)] {
            let f = Flux::new(p, q).unwrap();
            let laws = translation_laws(l, f).unwrap();
            assert!(laws.composition_defect < 1e-11 && laws.commutator_defect < 1e-11, "{p}/{q} L={l}");
            assert!(plaquette_defect(l, f).unwrap() < 1e-12);
        }
        let f = Flux::new(1, 3).unwrap();
        assert_eq!(magnetic_translation(4, f, (1, 0)), Err(Error::IncommensurateFlux { l: 4, q: 3 }));
        assert!(magnetic_translation(3, f, (3, 0)).is_err());
        assert!(Flux::new(1, 0).is_err());
    }
}
