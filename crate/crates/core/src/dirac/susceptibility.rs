//! Magnetic susceptibility of a Dirac gas, split into Landau-Peierls (LP),
//! Pauli (P), charge-spread (sp), g-factor (g) and magnetodynamic (MD)
//! parts, plus the compact total.
//!
//! Units: ħ = c = Δ = 1, results in e²/ħc. With ε² = 1 + η² and f the Fermi
//! function at μ = √(1 + x²):
//!
//! ```text
//! χ_LP =  1/(24π²)    ∫dη ∫_ε^∞ ε²/E³ f′ dE
//! χ_P  = −(1+λ′)²/(8π²) ∫dη ∫_ε^∞ f′/E dE
//! χ_sp = −1/(8π²)     ∫dη ∫_ε^∞ (ε²/E⁴)(1 + λ′²E²) f dE
//! χ_g  =  (1+λ′)²/(8π²) ∫dη ∫_ε^∞ f/E² dE
//! χ_MD = −λ′²/(8π²)    ∫dη ∫_ε^∞ (E² − ε²)/E f′ dE
//! χ    = ((1+λ′)² − 1/3)/(4π²) ∫_0^∞ f(ε)/ε dη + λ′²/(4π²) ∫_0^∞ G(ε − μ) dη
//! ```
//!
//! with G(ε − μ) = T ln(1 + e^{−(ε−μ)/T}) = ∫_ε^∞ f dE. Integration by parts
//! shows χ equals the sum of the five parts, which the tests check.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, Execution};
use crate::quadrature::{gauss_kronrod_try, tanh_sinh_try, Tolerance};

/// Dimensionless parameters of one susceptibility evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SusceptibilityInput {
    /// Fermi momentum in units of the gap, η_F/Δ.
    pub x: f64,
    /// Anomalous moment λ′ = (g − 2)/2.
    pub lambda_prime: f64,
    /// Reduced temperature k_B T/Δ.
    pub t_red: f64,
    /// Add the hole contribution (f(ε) → 1 − f(−ε), i.e. μ → −μ).
    pub holes: bool,
}

impl SusceptibilityInput {
    pub fn new(x: f64, lambda_prime: f64, t_red: f64) -> Result<Self> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidArgument(format!("x must be positive and finite, got {x}")));
        }
        if !lambda_prime.is_finite() {
            return Err(Error::InvalidArgument("lambda_prime must be finite".into()));
        }
        if !(t_red >= 0.0 && t_red.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_red must be >= 0, got {t_red}")));
        }
        Ok(Self { x, lambda_prime, t_red, holes: false })
    }

    pub fn with_holes(mut self, holes: bool) -> Self {
        self.holes = holes;
        self
    }

    pub fn mu(&self) -> f64 {
        self.x.hypot(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiComponents {
    pub chi_lp: f64,
    pub chi_p: f64,
    pub chi_sp: f64,
    pub chi_g: f64,
    pub chi_md: f64,
    /// Evaluated from the compact total, not by summing the parts.
    pub chi_total: f64,
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

impl ChiComponents {
    const ZERO: Self = Self { chi_lp: 0.0, chi_p: 0.0, chi_sp: 0.0, chi_g: 0.0, chi_md: 0.0, chi_total: 0.0 };

    pub fn as_array(&self) -> [f64; 6] {
        [self.chi_lp, self.chi_p, self.chi_sp, self.chi_g, self.chi_md, self.chi_total]
    }

    pub fn component_sum(&self) -> f64 {
        self.chi_lp + self.chi_p + self.chi_sp + self.chi_g + self.chi_md
    }

    /// Largest entrywise relative difference.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| rel_diff(*a, b))
            .fold(0.0, f64::max)
    }

    fn plus(self, o: Self) -> Self {
        Self {
            chi_lp: self.chi_lp + o.chi_lp,
            chi_p: self.chi_p + o.chi_p,
            chi_sp: self.chi_sp + o.chi_sp,
            chi_g: self.chi_g + o.chi_g,
            chi_md: self.chi_md + o.chi_md,
            chi_total: self.chi_total + o.chi_total,
        }
    }
}

/// Which 1-D rule drives the η and E integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rule {
    /// Tanh-sinh; the default at finite temperature.
    #[default]
    TanhSinh,
    /// Adaptive Gauss-Kronrod; the default at T = 0.
    GaussKronrod,
}

/// Relative tolerance of the finite-temperature integrals.
pub const FINITE_T_TOLERANCE: f64 = 1e-9;
const ZERO_T_TOLERANCE: f64 = 1e-13;
// Fermi tails beyond this many k_B T are below e^{-40}.
const TAIL: f64 = 40.0;

fn integrate<F>(rule: Rule, f: F, a: f64, b: f64, rel: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if b <= a {
        return Ok(0.0);
    }
    let tol = Tolerance::relative(rel);
    match rule {
        Rule::TanhSinh => tanh_sinh_try(f, a, b, tol).map(|e| e.value),
        Rule::GaussKronrod => gauss_kronrod_try(f, a, b, tol).map(|e| e.value),
    }
}

/// Integrates over consecutive panels between sorted breakpoints.
fn integrate_pieces<F>(rule: Rule, mut f: F, points: &[f64], rel: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut total = 0.0;
    for w in points.windows(2) {
        total += integrate(rule, &mut f, w[0], w[1], rel)?;
    }
    Ok(total)
}

fn prefactors(lp: f64) -> [f64; 5] {
    let g2 = (1.0 + lp).powi(2);
    let p8 = 8.0 * PI * PI;
    [1.0 / (3.0 * p8), -g2 / p8, -1.0 / p8, g2 / p8, -lp * lp / p8]
}

/// Evaluates all parts by quadrature with the default rule for the
/// temperature (Gauss-Kronrod at T = 0, tanh-sinh otherwise).
pub fn chi_components(inp: &SusceptibilityInput) -> Result<ChiComponents> {
    let rule = if inp.t_red == 0.0 { Rule::GaussKronrod } else { Rule::TanhSinh };
    chi_components_with(inp, rule)
}

pub fn chi_components_with(inp: &SusceptibilityInput, rule: Rule) -> Result<ChiComponents> {
    let mu = inp.mu();
    let particles = particles_at(mu, inp.lambda_prime, inp.t_red, rule)?;
    if inp.holes {
        Ok(particles.plus(particles_at(-mu, inp.lambda_prime, inp.t_red, rule)?))
    } else {
        Ok(particles)
    }
}

/// Particle contribution at chemical potential `mu` (which may be negative).
pub(crate) fn particles_at(mu: f64, lp: f64, t: f64, rule: Rule) -> Result<ChiComponents> {
    if t == 0.0 {
        zero_t_quadrature(mu, lp, rule)
    } else {
        finite_t_quadrature(mu, lp, t, rule)
    }
}

// T = 0: f is a step at μ, f′ = −δ(E − μ); the inner E-integrals are
// elementary and written in cancellation-free form.
fn zero_t_quadrature(mu: f64, lp: f64, rule: Rule) -> Result<ChiComponents> {
    if mu <= 1.0 {
        return Ok(ChiComponents::ZERO);
    }
    let eta_f = (mu * mu - 1.0).sqrt();
    let mu3 = mu.powi(3);
    let pre = prefactors(lp);
    let rel = ZERO_T_TOLERANCE;
    // μ − ε for |η| < η_F.
    let gap = |eta: f64, eps: f64| (eta_f - eta) * (eta_f + eta) / (mu + eps);
    let outer = |inner: &dyn Fn(f64, f64) -> f64| -> Result<f64> {
        let v = integrate(rule, |eta| Ok(inner(eta, eta.hypot(1.0))), 0.0, eta_f, rel)?;
        Ok(2.0 * v)
    };
    let lp2 = lp * lp;
    let chi_lp = pre[0] * outer(&|_, eps| -eps * eps / mu3)?;
    let chi_p = pre[1] * outer(&|_, _| -1.0 / mu)?;
    let chi_sp = pre[2]
        * outer(&|eta, eps| {
            let d = gap(eta, eps);
            d * (mu * mu + mu * eps + eps * eps) / (3.0 * eps * mu3) + lp2 * eps * d / mu
        })?;
    let chi_g = pre[3] * outer(&|eta, eps| gap(eta, eps) / (eps * mu))?;
    let chi_md = pre[4] * outer(&|eta, _| -(eta_f - eta) * (eta_f + eta) / mu)?;
    let p4 = 4.0 * PI * PI;
    let first = integrate(rule, |eta| Ok(1.0 / eta.hypot(1.0)), 0.0, eta_f, rel)?;
    let second = integrate(rule, |eta| Ok(gap(eta, eta.hypot(1.0))), 0.0, eta_f, rel)?;
    let chi_total = ((1.0 + lp).powi(2) - 1.0 / 3.0) / p4 * first + lp2 / p4 * second;
    Ok(ChiComponents { chi_lp, chi_p, chi_sp, chi_g, chi_md, chi_total })
}

fn fermi(e: f64, mu: f64, t: f64) -> f64 {
    let z = (e - mu) / t;
    if z > 0.0 {
        let w = (-z).exp();
        w / (1.0 + w)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

fn fermi_prime(e: f64, mu: f64, t: f64) -> f64 {
    let c = ((e - mu) / (2.0 * t)).cosh();
    -1.0 / (4.0 * t * c * c)
}

// T ln(1 + e^{−(ε−μ)/T}).
fn g_function(eps: f64, mu: f64, t: f64) -> f64 {
    let z = (eps - mu) / t;
    if z > 0.0 {
        t * (-z).exp().ln_1p()
    } else {
        t * (-z + z.exp().ln_1p())
    }
}

fn finite_t_quadrature(mu: f64, lp: f64, t: f64, rule: Rule) -> Result<ChiComponents> {
    let e_max = mu + TAIL * t;
    if e_max <= 1.0 {
        return Ok(ChiComponents::ZERO);
    }
    let rel = FINITE_T_TOLERANCE;
    let inner_rel = rel * 1e-2;
    let eta_of = |e: f64| (e * e - 1.0).max(0.0).sqrt();
    let eta_max = eta_of(e_max);
    let mut outer_points = vec![0.0];
    for e in [mu - TAIL * t, mu] {
        if e > 1.0 && eta_of(e) < eta_max {
            outer_points.push(eta_of(e));
        }
    }
    outer_points.push(eta_max);

    // Inner E-panels from ε: the occupied plateau, the lower and upper
    // halves of the Fermi edge.
    let inner_points = |eps: f64, with_plateau: bool| -> Vec<f64> {
        let mut p = vec![eps];
        let lo = mu - TAIL * t;
        if with_plateau {
            if lo > eps {
                p.push(lo);
            }
        } else {
            p[0] = eps.max(lo);
        }
        if mu > p[p.len() - 1] {
            p.push(mu);
        }
        if e_max > p[p.len() - 1] {
            p.push(e_max);
        }
        p
    };
    let lp2 = lp * lp;
    let pre = prefactors(lp);

    type Weight = fn(f64, f64, f64) -> f64;
    // (weight(E, ε², λ′²), uses f′ instead of f)
    let parts: [(Weight, bool); 5] = [
        (|e, eps2, _| eps2 / e.powi(3), true),
        (|e, _, _| 1.0 / e, true),
        (|e, eps2, l2| eps2 / e.powi(4) * (1.0 + l2 * e * e), false),
        (|e, _, _| 1.0 / (e * e), false),
        (|e, eps2, _| (e * e - eps2) / e, true),
    ];
    let mut vals = [0.0; 5];
    for (slot, (weight, derivative)) in vals.iter_mut().zip(parts) {
        let outer = |eta: f64| -> Result<f64> {
            let eps = eta.hypot(1.0);
            let eps2 = 1.0 + eta * eta;
            if eps >= e_max {
                return Ok(0.0);
            }
            let pts = inner_points(eps, !derivative);
            integrate_pieces(
                rule,
                |e| {
                    let occ = if derivative { fermi_prime(e, mu, t) } else { fermi(e, mu, t) };
                    Ok(weight(e, eps2, lp2) * occ)
                },
                &pts,
                inner_rel,
            )
        };
        *slot = 2.0 * integrate_pieces(rule, outer, &outer_points, rel)?;
    }
    for (v, p) in vals.iter_mut().zip(pre) {
        *v *= p;
    }
    let p4 = 4.0 * PI * PI;
    let first = integrate_pieces(rule, |eta| { let e = eta.hypot(1.0); Ok(fermi(e, mu, t) / e) }, &outer_points, rel)?;
    let second = integrate_pieces(rule, |eta| Ok(g_function(eta.hypot(1.0), mu, t)), &outer_points, rel)?;
    let chi_total = ((1.0 + lp).powi(2) - 1.0 / 3.0) / p4 * first + lp2 / p4 * second;
    Ok(ChiComponents {
        chi_lp: vals[0],
        chi_p: vals[1],
        chi_sp: vals[2],
        chi_g: vals[3],
        chi_md: vals[4],
        chi_total,
    })
}

/// Closed forms at T = 0 (both integrals done by hand); the reference the
/// quadrature is held to.
pub fn chi_components_analytic(inp: &SusceptibilityInput) -> Result<ChiComponents> {
    if inp.t_red != 0.0 {
        return Err(Error::InvalidArgument("closed forms exist only at t_red = 0".into()));
    }
    // Holes are empty at T = 0.
    let x = inp.x;
    let lp = inp.lambda_prime;
    let mu = inp.mu();
    let p4 = 4.0 * PI * PI;
    let g2 = (1.0 + lp).powi(2);
    let lp2 = lp * lp;
    let cube = x.powi(3) / 3.0 + x;
    let chi_lp = -cube / (3.0 * p4 * mu.powi(3));
    let chi_p = g2 * x / (p4 * mu);
    let chi_sp = -x.asinh() / (3.0 * p4) - chi_lp - lp2 / p4 * (x * mu + x.asinh()) / 2.0 + lp2 / p4 * cube / mu;
    let chi_g = g2 / p4 * (x.asinh() - x / mu);
    let chi_md = lp2 / p4 * (2.0 * x.powi(3) / 3.0) / mu;
    let chi_total = (g2 - 1.0 / 3.0) / p4 * x.asinh() + lp2 / p4 * (x * mu - x.asinh()) / 2.0;
    Ok(ChiComponents { chi_lp, chi_p, chi_sp, chi_g, chi_md, chi_total })
}

/// `points` log-spaced values from `x_min` to `x_max` inclusive.
pub fn log_grid(x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(x_min > 0.0 && x_max >= x_min && x_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < x_min <= x_max, got {x_min}, {x_max}")));
    }
    match points {
        0 => Err(Error::InvalidArgument("points must be at least 1".into())),
        1 => Ok(vec![x_min]),
        n => {
            let (a, b) = (x_min.ln(), x_max.ln());
            Ok((0..n)
                .map(|i| {
                    if i == 0 {
                        x_min
                    } else if i == n - 1 {
                        x_max
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    #[serde(flatten)]
    pub chi: ChiComponents,
}

/// Evaluates [`chi_components`] on every x of `xs`.
pub fn chi_sweep(xs: &[f64], lambda_prime: f64, t_red: f64, holes: bool, exec: Execution) -> Result<Vec<SweepRow>> {
    let inputs = xs
        .iter()
        .map(|&x| SusceptibilityInput::new(x, lambda_prime, t_red).map(|i| i.with_holes(holes)))
        .collect::<Result<Vec<_>>>()?;
    try_map_indexed(exec, inputs.len(), |i| {
        Ok(SweepRow { x: inputs[i].x, chi: chi_components(&inputs[i])? })
    })
}

/// One asymptotic comparison against the zero-temperature limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCheck {
    pub name: String,
    pub limit: String,
    pub x: f64,
    pub value: f64,
    pub expected: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl LimitCheck {
    fn new(name: &str, limit: &str, x: f64, value: f64, expected: f64, tolerance: f64) -> Self {
        let rel_error = ((value - expected) / expected).abs();
        Self {
            name: name.into(),
            limit: limit.into(),
            x,
            value,
            expected,
            rel_error,
            tolerance,
            pass: rel_error < tolerance,
        }
    }
}

/// Ultrarelativistic point for the limit checks.
pub const UR_X: f64 = 1e3;
/// Nonrelativistic point for the ratio check.
pub const NR_X: f64 = 1e-2;

/// T = 0 quadrature against the asymptotic table values: χ_P → (1+λ′)²/4π²
/// and χ_LP → −1/36π² as x → ∞ (2%), χ_P/χ_LP → −3(1+λ′)² as x → 0 (1%),
/// and the (ln 2x − 1) growth of χ_g between x = 10² and 10³ (3%).
pub fn limit_checks(lambda_prime: f64) -> Result<Vec<LimitCheck>> {
    let p4 = 4.0 * PI * PI;
    let g2 = (1.0 + lambda_prime).powi(2);
    let ur = chi_components(&SusceptibilityInput::new(UR_X, lambda_prime, 0.0)?)?;
    let nr = chi_components(&SusceptibilityInput::new(NR_X, lambda_prime, 0.0)?)?;
    let mid = chi_components(&SusceptibilityInput::new(UR_X / 10.0, lambda_prime, 0.0)?)?;
    let log_law = |x: f64| (2.0 * x).ln() - 1.0;
    Ok(vec![
        LimitCheck::new("chi_P", "ultrarelativistic", UR_X, ur.chi_p, g2 / p4, 0.02),
        LimitCheck::new("chi_LP", "ultrarelativistic", UR_X, ur.chi_lp, -1.0 / (9.0 * p4), 0.02),
        LimitCheck::new("chi_P/chi_LP", "nonrelativistic", NR_X, nr.chi_p / nr.chi_lp, -3.0 * g2, 0.01),
        LimitCheck::new(
            "chi_g growth",
            "ultrarelativistic",
            UR_X,
            ur.chi_g / mid.chi_g,
            log_law(UR_X) / log_law(UR_X / 10.0),
            0.03,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(x: f64, lp: f64, t: f64) -> SusceptibilityInput {
        SusceptibilityInput::new(x, lp, t).unwrap()
    }

    #[test]
    fn input_validation() {
        assert!(SusceptibilityInput::new(0.0, 0.0, 0.0).is_err());
        assert!(SusceptibilityInput::new(1.0, f64::NAN, 0.0).is_err());
        assert!(SusceptibilityInput::new(1.0, 0.0, -1.0).is_err());
        assert!(chi_components_analytic(&input(1.0, 0.0, 0.1)).is_err());
    }

    #[test]
    fn zero_t_quadrature_matches_closed_forms() {
        for lp in [0.0, 0.00116, 0.5, -0.3] {
            for x in log_grid(1e-2, 1e3, 25).unwrap() {
                let inp = input(x, lp, 0.0);
                let q = chi_components(&inp).unwrap();
                let a = chi_components_analytic(&inp).unwrap();
                assert!(q.max_rel_diff(&a) < 1e-8, "x={x} lp={lp}: {q:?} vs {a:?}");
                let ts = chi_components_with(&inp, Rule::TanhSinh).unwrap();
                assert!(ts.max_rel_diff(&a) < 1e-8);
            }
        }
    }

    #[test]
    fn total_is_sum_of_parts() {
        for lp in [0.0, 0.2] {
            for x in [0.05, 1.0, 30.0] {
                let a = chi_components_analytic(&input(x, lp, 0.0)).unwrap();
                assert!(rel_diff(a.chi_total, a.component_sum()) < 1e-12, "{x} {lp}");
            }
        }
        assert_eq!(chi_components(&input(2.0, 0.0, 0.0)).unwrap().chi_md, 0.0);
    }

    #[test]
    fn finite_temperature_consistency() {
        for (x, lp, t) in [(1.0, 0.0, 0.05), (0.3, 0.2, 0.02), (5.0, 0.1, 0.5)] {
            let c = chi_components(&input(x, lp, t)).unwrap();
            assert!(rel_diff(c.chi_total, c.component_sum()) < 1e-7, "{x} {t}: {c:?}");
            let gk = chi_components_with(&input(x, lp, t), Rule::GaussKronrod).unwrap();
            assert!(c.max_rel_diff(&gk) < 1e-7, "{c:?} vs {gk:?}");
        }
        // Sommerfeld: corrections are O(T²).
        let cold = chi_components(&input(2.0, 0.1, 1e-3)).unwrap();
        let zero = chi_components_analytic(&input(2.0, 0.1, 0.0)).unwrap();
        assert!(cold.max_rel_diff(&zero) < 1e-5, "{cold:?} vs {zero:?}");
    }

    #[test]
    fn holes_mirror_chemical_potential() {
        let inp = input(0.5, 0.1, 0.8);
        let both = chi_components(&inp.with_holes(true)).unwrap();
        let particles = chi_components(&inp).unwrap();
        let holes = particles_at(-inp.mu(), 0.1, 0.8, Rule::TanhSinh).unwrap();
        assert!(both.max_rel_diff(&particles.plus(holes)) < 1e-14);
        assert!(holes.chi_g > 0.0);
        // No thermal holes at T = 0.
        let z = chi_components(&input(0.5, 0.1, 0.0).with_holes(true)).unwrap();
        assert_eq!(z, chi_components(&input(0.5, 0.1, 0.0)).unwrap());
    }

    #[test]
    fn asymptotic_limits() {
        for lp in [0.0, 0.00116] {
            for c in limit_checks(lp).unwrap() {
                assert!(c.pass, "{c:?}");
            }
        }
        // Nonrelativistic: λ′-dependent parts vanish.
        let nr = chi_components(&input(1e-3, 0.0, 0.0)).unwrap();
        assert_eq!(nr.chi_md, 0.0);
        let nr = chi_components(&input(1e-3, 0.5, 0.0)).unwrap();
        assert!(nr.chi_md.abs() < 1e-10);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.01, 1000.0, 60).unwrap();
        assert_eq!(g.len(), 60);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[59], 1000.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(log_grid(1.0, 0.5, 3).is_err());
        assert!(log_grid(1.0, 2.0, 0).is_err());
    }

    #[test]
    fn sweep_policies_agree() {
        let xs = log_grid(0.1, 10.0, 6).unwrap();
        let a = chi_sweep(&xs, 0.0, 0.0, false, Execution::Sequential).unwrap();
        let b = chi_sweep(&xs, 0.0, 0.0, false, Execution::default()).unwrap();
        assert_eq!(a, b);
    }
}
