//! Library results against independent closed forms from special functions.

use std::f64::consts::PI;

use statrs::distribution::{DiscreteCDF, Poisson};
use statrs::function::erf::erf;

use weyl_lattice::dirac::susceptibility::{chi_components, chi_components_analytic, SusceptibilityInput};
use weyl_lattice::fock::{coherent_amplitudes, tail_probability, AlphaGrid};

// Diagonal of (1/π) Σ |α⟩⟨α| ΔA over the square [−R, R]²: for n = 0 it is
// erf(R)², for n = 1 erf(R)² − (2/√π) R e^{−R²} erf(R).
#[test]
fn counting_measure_diagonal_on_square() {
    let r = 3.0;
    let grid = AlphaGrid::midpoint_square(r, 240).unwrap();
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for a in grid.points() {
        let amp = coherent_amplitudes(a, 2);
        d0 += amp[0].norm_sqr();
        d1 += amp[1].norm_sqr();
    }
    d0 *= grid.cell_area() / PI;
    d1 *= grid.cell_area() / PI;
    let e = erf(r);
    assert!((d0 - e * e).abs() < 1e-4, "{d0} vs {}", e * e);
    let want1 = e * e - 2.0 / PI.sqrt() * r * (-r * r).exp() * e;
    assert!((d1 - want1).abs() < 1e-4, "{d1} vs {want1}");
}

#[test]
fn coherent_tail_is_poisson_survival() {
    for lambda in [0.5, 2.0, 9.0] {
        let p = Poisson::new(lambda).unwrap();
        for m in [1usize, 3, 8, 20] {
            let want = 1.0 - p.cdf(m as u64 - 1);
            let got = tail_probability(lambda, m);
            if want > 1e-12 {
                assert!((got / want - 1.0).abs() < 1e-9, "λ={lambda} m={m}: {got} vs {want}");
            } else {
                assert!(got < 1e-11);
            }
        }
    }
}

// Low temperature approaches the T = 0 closed forms.
#[test]
fn cold_limit_matches_closed_forms() {
    let x = 0.7;
    let cold = chi_components(&SusceptibilityInput::new(x, 0.2, 2e-3).unwrap()).unwrap();
    let zero = chi_components_analytic(&SusceptibilityInput::new(x, 0.2, 0.0).unwrap()).unwrap();
    let diff = cold.max_rel_diff(&zero);
    assert!(diff < 1e-3, "{diff}");
}
