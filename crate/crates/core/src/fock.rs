//! Single-mode bosonic Fock space truncated to `M` levels.
//!
//! Coherent-state amplitudes, displacement matrix elements and Husimi values
//! use closed forms of the untruncated space projected onto `|0⟩…|M−1⟩`, so
//! grids can extend past the cutoff without silent truncation errors. The
//! matrix-exponential route is kept as [`glauber_displacement`] and guarded by
//! cutoff checks.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::gridio::{fmt_f64, parse_f64};
use crate::operator::{mat_exp_matrix, BasisTag, ComplexOperator, C64, I, ONE, ZERO};
use crate::weyl::{validate_density, OperatorOrdering};

/// Largest probability allowed above the top Fock level.
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct FockSpace {
    cutoff: usize,
    a: ComplexOperator,
    adag: ComplexOperator,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidArgument(format!("Fock cutoff must be at least 2, got {cutoff}")));
        }
        let a = annihilation_matrix(cutoff);
        let adag = a.adjoint();
        Ok(Self {
            cutoff,
            a: ComplexOperator::from_parts(a, BasisTag::Fock(cutoff)),
            adag: ComplexOperator::from_parts(adag, BasisTag::Fock(cutoff)),
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn a(&self) -> &ComplexOperator {
        &self.a
    }

    pub fn adag(&self) -> &ComplexOperator {
        &self.adag
    }

    pub fn number(&self) -> ComplexOperator {
        self.adag.compose(&self.a).expect("same space")
    }

    pub fn basis(&self) -> BasisTag {
        BasisTag::Fock(self.cutoff)
    }

    fn check(&self, op: &ComplexOperator) -> Result<()> {
        if op.dim() != self.cutoff {
            return Err(Error::DimMismatch(format!("operator dimension {} on a cutoff-{} Fock space", op.dim(), self.cutoff)));
        }
        Ok(())
    }
}

pub(crate) fn annihilation_matrix(cutoff: usize) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = C64::from((n as f64).sqrt());
    }
    a
}

/// `Q = (a + a†)/√2`, `P = (a − a†)/(i√2)`.
pub fn quadratures(fock: &FockSpace) -> (ComplexOperator, ComplexOperator) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a = fock.a.matrix();
    let ad = fock.adag.matrix();
    let q = (a + ad) * C64::from(s);
    let p = (a - ad) * (C64::from(s) / I);
    (
        ComplexOperator::from_parts(q, fock.basis()),
        ComplexOperator::from_parts(p, fock.basis()),
    )
}

/// `e^{−|α|²/2} α^n / √n!` for `n < m`.
pub fn coherent_amplitudes(alpha: C64, m: usize) -> DVector<C64> {
    let mut v = DVector::zeros(m);
    let mut amp = C64::from((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..m {
        v[n] = amp;
        amp *= alpha / ((n + 1) as f64).sqrt();
    }
    v
}

/// Poisson probability of finding `n ≥ m` quanta in `|α⟩`.
pub fn tail_probability(alpha_sq: f64, m: usize) -> f64 {
    // Summed from the tail side so tiny values keep full relative accuracy.
    let mut log_term = -alpha_sq + m as f64 * alpha_sq.max(f64::MIN_POSITIVE).ln() - ln_factorial(m);
    let mut total = 0.0;
    for n in m..m + 2000 {
        let t = log_term.exp();
        total += t;
        if t < total * 1e-17 && n as f64 > alpha_sq {
            break;
        }
        log_term += alpha_sq.max(f64::MIN_POSITIVE).ln() - ((n + 1) as f64).ln();
    }
    if alpha_sq == 0.0 {
        0.0
    } else {
        total
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn check_cutoff(fock: &FockSpace, alpha: C64, fraction: f64) -> Result<()> {
    let alpha_sq = alpha.norm_sqr();
    let m = fock.cutoff;
    if alpha_sq > m as f64 * fraction || tail_probability(alpha_sq, m) > TAIL_TOLERANCE {
        return Err(Error::CutoffTooSmall { cutoff: m, alpha_sq });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CoherentState {
    pub alpha: C64,
    pub amplitudes: DVector<C64>,
}

impl CoherentState {
    /// `‖a|α⟩ − α|α⟩‖`.
    pub fn eigen_residual(&self, fock: &FockSpace) -> f64 {
        (fock.a.matrix() * &self.amplitudes - &self.amplitudes * self.alpha).norm()
    }

    pub fn overlap(&self, other: &CoherentState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self, fock: &FockSpace) -> ComplexOperator {
        ComplexOperator::from_parts(&self.amplitudes * self.amplitudes.adjoint(), fock.basis())
    }
}

/// `|α⟩ = e^{−|α|²/2} Σ α^n/√n! |n⟩`; requires `|α|² ≤ M/4` and a negligible tail.
pub fn coherent_state(fock: &FockSpace, alpha: C64) -> Result<CoherentState> {
    check_cutoff(fock, alpha, 0.25)?;
    Ok(CoherentState { alpha, amplitudes: coherent_amplitudes(alpha, fock.cutoff) })
}

/// `D(α) = exp(α a† − ᾱ a)` by matrix exponential; requires `|α|² ≤ M/8`.
pub fn glauber_displacement(fock: &FockSpace, alpha: C64) -> Result<ComplexOperator> {
    let alpha_sq = alpha.norm_sqr();
    if alpha_sq > fock.cutoff as f64 / 8.0 {
        return Err(Error::CutoffTooSmall { cutoff: fock.cutoff, alpha_sq });
    }
    let gen = fock.adag.matrix() * alpha - fock.a.matrix() * alpha.conj();
    Ok(ComplexOperator::from_parts(mat_exp_matrix(&gen, 1e-15)?, fock.basis()))
}

/// Laguerre polynomials `L_k^{(s)}(x)` for `k = 0..=n`.
fn laguerre_all(n: usize, s: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(1.0 + s as f64 - x);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + s as f64 - x) * out[k] - (kf + s as f64) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Exact `⟨m|D(ξ)|n⟩` of the untruncated oscillator, for `m, n < M`.
pub fn displacement_elements(xi: C64, m: usize) -> DMatrix<C64> {
    let x = xi.norm_sqr();
    let gauss = (-x / 2.0).exp();
    let mut d = DMatrix::zeros(m, m);
    for s in 0..m {
        let lag = laguerre_all(m - 1 - s, s, x);
        for (n, l) in lag.iter().enumerate() {
            let row = n + s;
            // √(n!/(n+s)!) ξ^s
            let mut pref = ONE;
            for k in 1..=s {
                pref *= xi / ((n + k) as f64).sqrt();
            }
            d[(row, n)] = pref * gauss * *l;
            if s > 0 {
                let mut pref_c = ONE;
                for k in 1..=s {
                    pref_c *= -xi.conj() / ((n + k) as f64).sqrt();
                }
                d[(n, row)] = pref_c * gauss * *l;
            }
        }
    }
    d
}

/// Rectangular sample of the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    re: Vec<f64>,
    im: Vec<f64>,
    cell_area: f64,
}

impl AlphaGrid {
    /// Evenly spaced points including both endpoints on each axis.
    pub fn uniform(re: (f64, f64), n_re: usize, im: (f64, f64), n_im: usize) -> Result<Self> {
        let axis = |(lo, hi): (f64, f64), n: usize| -> Result<(Vec<f64>, f64)> {
            if n == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
                return Err(Error::InvalidArgument(format!("bad grid axis [{lo}, {hi}] with {n} points")));
            }
            if n == 1 {
                return Ok((vec![lo], 0.0));
            }
            let h = (hi - lo) / (n - 1) as f64;
            Ok(((0..n).map(|i| lo + h * i as f64).collect(), h))
        };
        let (re, hr) = axis(re, n_re)?;
        let (im, hi) = axis(im, n_im)?;
        Ok(Self { re, im, cell_area: hr * hi })
    }

    /// Centres of `cells × cells` equal squares tiling `[−r, r]²`.
    pub fn midpoint_square(r: f64, cells: usize) -> Result<Self> {
        if cells == 0 || !(r >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad midpoint grid r = {r}, cells = {cells}")));
        }
        let h = 2.0 * r / cells as f64;
        let axis: Vec<f64> = (0..cells).map(|i| -r + h * (i as f64 + 0.5)).collect();
        Ok(Self { re: axis.clone(), im: axis, cell_area: h * h })
    }

    pub fn re_axis(&self) -> &[f64] {
        &self.re
    }

    pub fn im_axis(&self) -> &[f64] {
        &self.im
    }

    /// Area attached to each point in Riemann sums.
    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }

    pub fn len(&self) -> usize {
        self.re.len() * self.im.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `k` in re-major order.
    pub fn point(&self, k: usize) -> C64 {
        C64::new(self.re[k / self.im.len()], self.im[k % self.im.len()])
    }

    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }
}

/// Complex values sampled on an [`AlphaGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaFunction {
    pub grid: AlphaGrid,
    pub values: Vec<C64>,
    pub kind: String,
    pub cutoff: usize,
}

impl AlphaFunction {
    pub fn at(&self, k: usize) -> C64 {
        self.values[k]
    }

    /// Riemann sum `Σ f(α) dA`.
    pub fn integral(&self) -> C64 {
        self.values.iter().sum::<C64>() * self.grid.cell_area
    }

    /// CSV with header `re_alpha,im_alpha,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re_alpha,im_alpha,re,im\n");
        for (k, v) in self.values.iter().enumerate() {
            let a = self.grid.point(k);
            let _ = writeln!(out, "{},{},{},{}", fmt_f64(a.re), fmt_f64(a.im), fmt_f64(v.re), fmt_f64(v.im));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = format!("{{\"M\":{},\"kind\":{},\"data\":[", self.cutoff, Value::String(self.kind.clone()));
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let a = self.grid.point(k);
            let _ = write!(out, "[{},{},{},{}]", fmt_f64(a.re), fmt_f64(a.im), fmt_f64(v.re), fmt_f64(v.im));
        }
        out.push_str("]}\n");
        out
    }

    /// Reads back the `(α, value)` rows of a CSV written by [`Self::to_csv`].
    pub fn parse_csv_rows(text: &str) -> Result<Vec<(C64, C64)>> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "re_alpha,im_alpha,re,im" => {}
            other => return Err(Error::InvalidArgument(format!("unexpected CSV header {other:?}"))),
        }
        lines
            .map(|line| {
                let c: Vec<&str> = line.split(',').collect();
                if c.len() != 4 {
                    return Err(Error::InvalidArgument(format!("expected 4 columns in {line:?}")));
                }
                Ok((C64::new(parse_f64(c[0])?, parse_f64(c[1])?), C64::new(parse_f64(c[2])?, parse_f64(c[3])?)))
            })
            .collect()
    }
}

fn check_density(rho: &ComplexOperator, fock: &FockSpace) -> Result<()> {
    fock.check(rho)?;
    validate_density(rho, 1e-10)
}

/// `χ_W(ξ) = Tr(ρ D(ξ))`, with `χ_N = e^{|ξ|²/2} χ_W` and `χ_A = e^{−|ξ|²/2} χ_W`.
pub fn boson_characteristic(
    rho: &ComplexOperator,
    fock: &FockSpace,
    ordering: OperatorOrdering,
    grid: &AlphaGrid,
) -> Result<AlphaFunction> {
    boson_characteristic_with(rho, fock, ordering, grid, Execution::default())
}

pub fn boson_characteristic_with(
    rho: &ComplexOperator,
    fock: &FockSpace,
    ordering: OperatorOrdering,
    grid: &AlphaGrid,
    exec: Execution,
) -> Result<AlphaFunction> {
    check_density(rho, fock)?;
    let m = fock.cutoff;
    let r = rho.matrix();
    let values = map_indexed(exec, grid.len(), |k| {
        let xi = grid.point(k);
        let d = displacement_elements(xi, m);
        let w: C64 = r.iter().zip(d.transpose().iter()).map(|(a, b)| a * b).sum();
        let x = xi.norm_sqr();
        match ordering {
            OperatorOrdering::Weyl => w,
            OperatorOrdering::Normal => w * (x / 2.0).exp(),
            OperatorOrdering::Antinormal => w * (-x / 2.0).exp(),
        }
    });
    let kind = match ordering {
        OperatorOrdering::Weyl => "char_weyl",
        OperatorOrdering::Normal => "char_normal",
        OperatorOrdering::Antinormal => "char_antinormal",
    };
    Ok(AlphaFunction { grid: grid.clone(), values, kind: kind.into(), cutoff: m })
}

/// Independent normal-ordered trace `Tr(ρ e^{ξ a†} e^{−ξ̄ a})`. On the truncated
/// space both exponentials are polynomials in nilpotent matrices, so this is
/// exact for the projected state.
pub fn normal_ordered_trace(rho: &ComplexOperator, fock: &FockSpace, xi: C64) -> Result<C64> {
    fock.check(rho)?;
    let e1 = mat_exp_matrix(&(fock.adag.matrix() * xi), 1e-16)?;
    let e2 = mat_exp_matrix(&(fock.a.matrix() * (-xi.conj())), 1e-16)?;
    Ok((rho.matrix() * e1 * e2).trace())
}

/// Husimi function `Q(α) = ⟨α|ρ|α⟩/π`.
pub fn husimi_q(rho: &ComplexOperator, fock: &FockSpace, grid: &AlphaGrid) -> Result<AlphaFunction> {
    husimi_q_with(rho, fock, grid, Execution::default())
}

pub fn husimi_q_with(rho: &ComplexOperator, fock: &FockSpace, grid: &AlphaGrid, exec: Execution) -> Result<AlphaFunction> {
    check_density(rho, fock)?;
    let m = fock.cutoff;
    let r = rho.matrix();
    let values = map_indexed(exec, grid.len(), |k| {
        let amp = coherent_amplitudes(grid.point(k), m);
        let q = amp.dotc(&(r * &amp)).re / std::f64::consts::PI;
        C64::new(q, 0.0)
    });
    Ok(AlphaFunction { grid: grid.clone(), values, kind: "husimi".into(), cutoff: m })
}

/// Riemann sum of `(1/π) ∫ |α⟩⟨α| d²α` over `grid`, compared with the identity
/// on the block `n ≤ n_max`. Returns the largest entry deviation.
pub fn counting_measure_check(fock: &FockSpace, grid: &AlphaGrid, n_max: usize) -> Result<f64> {
    if n_max >= fock.cutoff {
        return Err(Error::InvalidArgument(format!("n_max = {n_max} must be below the cutoff {}", fock.cutoff)));
    }
    let b = n_max + 1;
    let partial = map_indexed(Execution::default(), grid.len(), |k| {
        let amp = coherent_amplitudes(grid.point(k), b);
        &amp * amp.adjoint()
    });
    let mut sum = DMatrix::<C64>::zeros(b, b);
    for p in &partial {
        sum += p;
    }
    sum *= C64::from(grid.cell_area / std::f64::consts::PI);
    let id = DMatrix::<C64>::identity(b, b);
    Ok(crate::operator::max_abs(&(sum - id)))
}

/// Vacuum density matrix `|0⟩⟨0|`.
pub fn vacuum(fock: &FockSpace) -> ComplexOperator {
    let mut m = DMatrix::zeros(fock.cutoff, fock.cutoff);
    m[(0, 0)] = ONE;
    ComplexOperator::from_parts(m, fock.basis())
}

/// `[a, a†]` restricted to levels `0..block`.
pub fn ccr_block_defect(a: &DMatrix<C64>, adag: &DMatrix<C64>, block: usize) -> f64 {
    let c = a * adag - adag * a;
    let mut worst = 0.0f64;
    for i in 0..block {
        for j in 0..block {
            let want = if i == j { ONE } else { ZERO };
            worst = worst.max((c[(i, j)] - want).norm());
        }
    }
    worst
}
