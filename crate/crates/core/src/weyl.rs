//! Lattice Weyl-Wigner calculus.
//!
//! Conventions: `Tr Δ(p,q) = 1`, `Tr(Δ Δ') = N δδ`, `Â = (1/N) Σ A(p,q) Δ(p,q)`,
//! and `W = (1/N) Tr(ρ Δ)` so that the Wigner function sums to one.
//! Characteristic functions use doubled arguments, `Tr(Â Y(2u, 2v))`, and the
//! symplectic pairing `Tr(Δ(p,q) Y(2u,2v)) = ω^{-2(pv - qu)}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::lattice::{dft_matrix, momentum_ket, PrimePhaseSpace};
use crate::operator::{BasisTag, ComplexOperator, C64, ONE, ZERO};

/// What a [`PhaseSpaceFunction`] grid holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionKind {
    Symbol,
    Wigner,
    CharWeyl,
    CharNormal,
    CharAntinormal,
    Smoothed(String),
}

impl FunctionKind {
    pub fn label(&self) -> String {
        match self {
            FunctionKind::Symbol => "symbol".into(),
            FunctionKind::Wigner => "wigner".into(),
            FunctionKind::CharWeyl => "char_weyl".into(),
            FunctionKind::CharNormal => "char_normal".into(),
            FunctionKind::CharAntinormal => "char_antinormal".into(),
            FunctionKind::Smoothed(g) => format!("smoothed:{g}"),
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        Ok(match label {
            "symbol" => FunctionKind::Symbol,
            "wigner" => FunctionKind::Wigner,
            "char_weyl" => FunctionKind::CharWeyl,
            "char_normal" => FunctionKind::CharNormal,
            "char_antinormal" => FunctionKind::CharAntinormal,
            other => match other.strip_prefix("smoothed:") {
                Some(g) => FunctionKind::Smoothed(g.to_string()),
                None => return Err(Error::InvalidArgument(format!("unknown grid kind {other:?}"))),
            },
        })
    }

    /// Whether the grid axes are (u, v) rather than (p, q).
    pub fn is_characteristic(&self) -> bool {
        matches!(self, FunctionKind::CharWeyl | FunctionKind::CharNormal | FunctionKind::CharAntinormal)
    }
}

/// Operator ordering for characteristic functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorOrdering {
    Weyl,
    Normal,
    Antinormal,
}

impl OperatorOrdering {
    pub fn kind(self) -> FunctionKind {
        match self {
            OperatorOrdering::Weyl => FunctionKind::CharWeyl,
            OperatorOrdering::Normal => FunctionKind::CharNormal,
            OperatorOrdering::Antinormal => FunctionKind::CharAntinormal,
        }
    }
}

/// Complex grid over `(p, q)` or `(u, v)`. Row index is the array index of the
/// first coordinate, column index that of the second.
#[derive(Debug, Clone)]
pub struct PhaseSpaceFunction {
    space: PrimePhaseSpace,
    grid: DMatrix<C64>,
    kind: FunctionKind,
}

impl PhaseSpaceFunction {
    pub fn new(space: &PrimePhaseSpace, grid: DMatrix<C64>, kind: FunctionKind) -> Result<Self> {
        let n = space.modulus();
        if grid.nrows() != n || grid.ncols() != n {
            return Err(Error::DimMismatch(format!(
                "grid is {}x{}, lattice has N = {n}",
                grid.nrows(),
                grid.ncols()
            )));
        }
        Ok(Self { space: space.clone(), grid, kind })
    }

    /// Builds a grid from a function of symmetric residues.
    pub fn from_fn(space: &PrimePhaseSpace, kind: FunctionKind, f: impl Fn(i64, i64) -> C64) -> Self {
        let n = space.modulus();
        let grid = DMatrix::from_fn(n, n, |i, j| f(space.residue_at(i).value(), space.residue_at(j).value()));
        Self { space: space.clone(), grid, kind }
    }

    pub fn space(&self) -> &PrimePhaseSpace {
        &self.space
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn grid(&self) -> &DMatrix<C64> {
        &self.grid
    }

    /// Value at symmetric (or any) residues.
    pub fn at(&self, a: i64, b: i64) -> C64 {
        let n = self.space.modulus();
        self.grid[(self.space.residue(a).index(n), self.space.residue(b).index(n))]
    }

    pub fn sum(&self) -> C64 {
        self.grid.iter().sum()
    }

    pub fn max_imag(&self) -> f64 {
        self.grid.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.grid.iter().zip(other.grid.iter()).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Entries as `(first, second, value)` with symmetric residues, sorted by
    /// `(first, second)`.
    pub fn entries(&self) -> Vec<(i64, i64, C64)> {
        let mut out: Vec<_> = (0..self.space.modulus())
            .flat_map(|i| (0..self.space.modulus()).map(move |j| (i, j)))
            .map(|(i, j)| (self.space.residue_at(i).value(), self.space.residue_at(j).value(), self.grid[(i, j)]))
            .collect();
        out.sort_by_key(|&(a, b, _)| (a, b));
        out
    }
}

fn check_lattice_operator(a: &ComplexOperator, space: &PrimePhaseSpace) -> Result<()> {
    let n = space.modulus();
    if a.dim() != n {
        return Err(Error::DimMismatch(format!("operator dimension {} on an N = {n} lattice", a.dim())));
    }
    match a.basis() {
        BasisTag::Position(_) | BasisTag::Generic(_) => Ok(()),
        other => Err(Error::DimMismatch(format!("expected a position-basis operator, got {other:?}"))),
    }
}

/// Shift `X^a|q⟩ = |q+a⟩`.
pub fn shift_x(space: &PrimePhaseSpace, a: i64) -> ComplexOperator {
    let n = space.modulus();
    let a = space.residue(a).index(n);
    let mut m = DMatrix::zeros(n, n);
    for q in 0..n {
        m[((q + a) % n, q)] = ONE;
    }
    ComplexOperator::from_parts(m, BasisTag::Position(n))
}

/// Clock `Z^b|q⟩ = ω^{bq}|q⟩`.
pub fn clock_z(space: &PrimePhaseSpace, b: i64) -> ComplexOperator {
    let n = space.modulus();
    let b = space.residue(b).index(n);
    let mut m = DMatrix::zeros(n, n);
    for q in 0..n {
        m[(q, q)] = space.omega_idx(b * q);
    }
    ComplexOperator::from_parts(m, BasisTag::Position(n))
}

/// Symmetric displacement `Y(u,v) = ω^{uv/2} X^v Z^u`, with `1/2` realized as
/// the inverse of two mod N.
pub fn displacement(space: &PrimePhaseSpace, u: i64, v: i64) -> Result<ComplexOperator> {
    let inv2 = space.require_odd()?;
    let n = space.modulus();
    let (u, v) = (space.residue(u).index(n), space.residue(v).index(n));
    let base = (u * v % n) * inv2;
    let mut m = DMatrix::zeros(n, n);
    for q in 0..n {
        m[((q + v) % n, q)] = space.omega_idx(base + u * q);
    }
    Ok(ComplexOperator::from_parts(m, BasisTag::Position(n)))
}

/// Phase-space point projector `Δ(p,q) = Σ_v ω^{2pv} |q+v⟩⟨q−v|`.
pub fn delta_projector(space: &PrimePhaseSpace, p: i64, q: i64) -> Result<ComplexOperator> {
    space.require_odd()?;
    let n = space.modulus();
    let (p, q) = (space.residue(p).index(n), space.residue(q).index(n));
    let mut m = DMatrix::zeros(n, n);
    for v in 0..n {
        m[((q + v) % n, (q + n - v) % n)] = space.omega_idx(2 * p * v);
    }
    Ok(ComplexOperator::from_parts(m, BasisTag::Position(n)))
}

/// The same projector assembled from momentum kets,
/// `Σ_u ω^{2uq} |p−u⟩⟨p+u|`, expressed in the position basis.
pub fn delta_projector_momentum_form(space: &PrimePhaseSpace, p: i64, q: i64) -> Result<ComplexOperator> {
    space.require_odd()?;
    let n = space.modulus();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for u in space.residues() {
        let u = u.value();
        let bra = momentum_ket(space, p + u);
        let ket = momentum_ket(space, p - u);
        m += (ket * bra.adjoint()) * space.omega(2 * u * q);
    }
    Ok(ComplexOperator::from_parts(m, BasisTag::Position(n)))
}

/// Weyl symbol `A(p,q) = Tr(Â Δ(p,q)) = Σ_v ω^{2pv} ⟨q−v|Â|q+v⟩`.
pub fn weyl_symbol(a: &ComplexOperator, space: &PrimePhaseSpace) -> Result<PhaseSpaceFunction> {
    weyl_symbol_with(a, space, Execution::default())
}

pub fn weyl_symbol_with(a: &ComplexOperator, space: &PrimePhaseSpace, exec: Execution) -> Result<PhaseSpaceFunction> {
    space.require_odd()?;
    check_lattice_operator(a, space)?;
    let n = space.modulus();
    let m = a.matrix();
    let vals = map_indexed(exec, n * n, |k| {
        let (p, q) = (k / n, k % n);
        (0..n).fold(ZERO, |acc, v| acc + space.omega_idx(2 * p * v) * m[((q + n - v) % n, (q + v) % n)])
    });
    let grid = DMatrix::from_row_slice(n, n, &vals);
    PhaseSpaceFunction::new(space, grid, FunctionKind::Symbol)
}

/// Inverse Weyl transform `Â = (1/N) Σ A(p,q) Δ(p,q)`.
///
/// Entry-wise: `⟨r|Â|c⟩ = (1/N) Σ_p A(p, (r+c)/2) ω^{p(r−c)}`.
pub fn from_symbol(f: &PhaseSpaceFunction) -> Result<ComplexOperator> {
    from_symbol_with(f, Execution::default())
}

pub fn from_symbol_with(f: &PhaseSpaceFunction, exec: Execution) -> Result<ComplexOperator> {
    if f.kind().is_characteristic() {
        return Err(Error::InvalidArgument(format!("from_symbol needs a (p,q) grid, got {}", f.kind().label())));
    }
    let space = f.space();
    let inv2 = space.require_odd()?;
    let n = space.modulus();
    let g = f.grid();
    let scale = 1.0 / n as f64;
    let vals = map_indexed(exec, n * n, |k| {
        let (r, c) = (k / n, k % n);
        let q = ((r + c) % n) * inv2 % n;
        let d = (r + n - c) % n;
        (0..n).fold(ZERO, |acc, p| acc + g[(p, q)] * space.omega_idx(p * d)) * scale
    });
    Ok(ComplexOperator::from_parts(DMatrix::from_row_slice(n, n, &vals), BasisTag::Position(n)))
}

/// Checks Hermiticity, unit trace and positivity to `tol`.
pub fn validate_density(rho: &ComplexOperator, tol: f64) -> Result<()> {
    let herm = rho.hermiticity_defect();
    if herm > tol {
        return Err(Error::NotDensityMatrix(format!("hermiticity defect {herm:e}")));
    }
    let tr = rho.trace();
    if (tr - ONE).norm() > tol {
        return Err(Error::NotDensityMatrix(format!("trace {tr}")));
    }
    let min = rho.hermitian_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// Wigner function `W(p,q) = (1/N) Tr(ρ Δ(p,q))`.
pub fn wigner_function(rho: &ComplexOperator, space: &PrimePhaseSpace) -> Result<PhaseSpaceFunction> {
    wigner_function_with(rho, space, Execution::default())
}

pub fn wigner_function_with(rho: &ComplexOperator, space: &PrimePhaseSpace, exec: Execution) -> Result<PhaseSpaceFunction> {
    check_lattice_operator(rho, space)?;
    validate_density(rho, 1e-10)?;
    let sym = weyl_symbol_with(rho, space, exec)?;
    let n = space.modulus() as f64;
    PhaseSpaceFunction::new(space, sym.grid / C64::from(n), FunctionKind::Wigner)
}

/// Characteristic function of `Â` in the requested ordering:
/// Weyl `Tr(Â Y(2u,2v))`, normal `Tr(Â X^{2v} Z^{2u})`, anti-normal
/// `Tr(Â Z^{2u} X^{2v})`. Each is evaluated from its own operator product.
pub fn characteristic(a: &ComplexOperator, space: &PrimePhaseSpace, ordering: OperatorOrdering) -> Result<PhaseSpaceFunction> {
    characteristic_with(a, space, ordering, Execution::default())
}

pub fn characteristic_with(
    a: &ComplexOperator,
    space: &PrimePhaseSpace,
    ordering: OperatorOrdering,
    exec: Execution,
) -> Result<PhaseSpaceFunction> {
    space.require_odd()?;
    check_lattice_operator(a, space)?;
    let n = space.modulus();
    let m = a.matrix();
    let vals = map_indexed(exec, n * n, |k| {
        let (u, v) = (k / n, k % n);
        let (u2, v2) = (2 * u % n, 2 * v % n);
        // Every ordering maps |q⟩ to a multiple of |q+2v⟩; only the phase differs.
        let phase = |q: usize| match ordering {
            OperatorOrdering::Weyl => space.omega_idx(u2 * v % n + u2 * q),
            OperatorOrdering::Normal => space.omega_idx(u2 * q),
            OperatorOrdering::Antinormal => space.omega_idx(u2 * ((q + v2) % n)),
        };
        (0..n).fold(ZERO, |acc, q| acc + m[(q, (q + v2) % n)] * phase(q))
    });
    PhaseSpaceFunction::new(space, DMatrix::from_row_slice(n, n, &vals), ordering.kind())
}

/// Symplectic inverse: `(1/N) Σ_{u,v} C(u,v) g(u,v) ω^{2(pv − qu)}`.
fn symplectic_inverse(
    chr: &PhaseSpaceFunction,
    g: &(dyn Fn(i64, i64) -> C64 + Sync),
    exec: Execution,
) -> Vec<C64> {
    let space = chr.space();
    let n = space.modulus();
    let c = chr.grid();
    let weights: Vec<C64> = (0..n * n)
        .map(|k| {
            let (u, v) = (k / n, k % n);
            c[(u, v)] * g(space.residue_at(u).value(), space.residue_at(v).value())
        })
        .collect();
    let scale = 1.0 / n as f64;
    map_indexed(exec, n * n, |k| {
        let (p, q) = (k / n, k % n);
        let mut acc = ZERO;
        for u in 0..n {
            for v in 0..n {
                let w = weights[u * n + v];
                if w != ZERO {
                    acc += w * space.omega_idx(2 * (p * v + (n - q) * u));
                }
            }
        }
        acc * scale
    })
}

/// Recovers the Weyl symbol from a Weyl-ordered characteristic function.
pub fn symbol_from_characteristic(chr: &PhaseSpaceFunction) -> Result<PhaseSpaceFunction> {
    if chr.kind() != &FunctionKind::CharWeyl {
        return Err(Error::InvalidArgument(format!("expected char_weyl, got {}", chr.kind().label())));
    }
    let n = chr.space().modulus();
    let vals = symplectic_inverse(chr, &|_, _| ONE, Execution::default());
    PhaseSpaceFunction::new(chr.space(), DMatrix::from_row_slice(n, n, &vals), FunctionKind::Symbol)
}

/// Smoothed distribution `f^{(g)}(p,q) = (1/N) Σ CharWeyl(u,v) g(u,v) ω^{2(pv−qu)}`.
/// `g ≡ 1` gives back the Weyl symbol.
pub fn smoothed_distribution(
    a: &ComplexOperator,
    space: &PrimePhaseSpace,
    g: impl Fn(i64, i64) -> C64 + Sync,
    label: &str,
) -> Result<PhaseSpaceFunction> {
    let chr = characteristic(a, space, OperatorOrdering::Weyl)?;
    let n = space.modulus();
    let vals = symplectic_inverse(&chr, &g, Execution::default());
    PhaseSpaceFunction::new(space, DMatrix::from_row_slice(n, n, &vals), FunctionKind::Smoothed(label.to_string()))
}

/// The qubit operations: `σx`, `σz` and the Hadamard (the N = 2 DFT).
pub fn qubit_paulis() -> (ComplexOperator, ComplexOperator, ComplexOperator) {
    let space = PrimePhaseSpace::new(2).expect("2 is prime");
    let x = shift_x(&space, 1);
    let z = clock_z(&space, 1);
    (x, z, dft_matrix(&space))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{parity, position_ket};
    use crate::operator::{anticommutator, max_abs};
    use crate::testutil::{random_density, random_operator, rng};

    fn sp(n: u64) -> PrimePhaseSpace {
        PrimePhaseSpace::new(n).unwrap()
    }

    #[test]
    fn shift_and_clock() {
        let s = sp(5);
        let id = ComplexOperator::identity(BasisTag::Position(5));
        assert_eq!(shift_x(&s, 1).pow(5), id);
        let s7 = sp(7);
        let (x, z) = (shift_x(&s7, 1), clock_z(&s7, 1));
        let zx = z.compose(&x).unwrap();
        let xz = x.compose(&z).unwrap().scale(s7.omega(1));
        assert!(zx.max_diff(&xz) < 1e-14);
        assert!(x.is_unitary(1e-14) && z.is_unitary(1e-14));
        // X^a is diagonal in momentum with entries ω^{−pa}.
        let f = dft_matrix(&s7);
        for a in -3..=3 {
            let xm = f.dagger().compose(&shift_x(&s7, a)).unwrap().compose(&f).unwrap();
            for i in 0..7 {
                for j in 0..7 {
                    let want = if i == j { s7.omega(-(i as i64) * a) } else { ZERO };
                    assert!((xm.get(i, j) - want).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn displacement_algebra() {
        let s = sp(3);
        let id = ComplexOperator::identity(BasisTag::Position(3));
        assert!(displacement(&s, 0, 0).unwrap().max_diff(&id) < 1e-15);
        let inv2 = s.inv2().unwrap() as i64;
        for u in -1..=1 {
            for v in -1..=1 {
                let y = displacement(&s, u, v).unwrap();
                assert!(y.is_unitary(1e-14));
                assert!(y.dagger().max_diff(&displacement(&s, -u, -v).unwrap()) < 1e-14);
                for u2 in -1..=1 {
                    for v2 in -1..=1 {
                        let lhs = y.compose(&displacement(&s, u2, v2).unwrap()).unwrap();
                        let rhs = displacement(&s, u + u2, v + v2).unwrap().scale(s.omega((u * v2 - v * u2) * inv2));
                        assert!(lhs.max_diff(&rhs) < 1e-14);
                    }
                }
            }
        }
        let s5 = sp(5);
        for u in -2..=2 {
            for v in -2..=2 {
                let tr = displacement(&s5, u, v).unwrap().trace();
                let want = if u == 0 && v == 0 { 5.0 } else { 0.0 };
                assert!((tr - C64::from(want)).norm() < 1e-13);
            }
        }
        assert_eq!(displacement(&sp(2), 1, 1).unwrap_err(), Error::QubitModeUnsupported);
    }

    #[test]
    fn projectors() {
        let s3 = sp(3);
        assert!(delta_projector(&s3, 0, 0).unwrap().max_diff(&parity(&s3)) < 1e-15);
        for n in [3u64, 5, 7] {
            let s = sp(n);
            let all: Vec<_> = (0..n as usize * n as usize)
                .map(|k| {
                    let (p, q) = (s.residue_at(k / n as usize).value(), s.residue_at(k % n as usize).value());
                    ((p, q), delta_projector(&s, p, q).unwrap())
                })
                .collect();
            for ((p, q), d) in &all {
                assert!(d.is_hermitian(1e-15));
                assert!((d.trace() - ONE).norm() < 1e-14);
                let alt = delta_projector_momentum_form(&s, *p, *q).unwrap();
                assert!(d.max_diff(&alt) < 1e-12, "N={n} ({p},{q})");
            }
            for ((p, q), d) in &all {
                for ((p2, q2), d2) in &all {
                    let tr = d.compose(d2).unwrap().trace();
                    let want = if (p, q) == (p2, q2) { n as f64 } else { 0.0 };
                    assert!((tr - C64::from(want)).norm() < 1e-12);
                }
            }
        }
        assert_eq!(delta_projector(&sp(2), 0, 0).unwrap_err(), Error::QubitModeUnsupported);
    }

    #[test]
    fn symbol_examples() {
        let s = sp(7);
        let id = ComplexOperator::identity(BasisTag::Position(7));
        let sym = weyl_symbol(&id, &s).unwrap();
        assert!(sym.grid().iter().all(|z| (z - ONE).norm() < 1e-14));
        assert!(from_symbol(&sym).unwrap().max_diff(&id) < 1e-14);

        let z = weyl_symbol(&clock_z(&s, 1), &s).unwrap();
        for (_, q, val) in z.entries() {
            assert!((val - s.omega(q)).norm() < 1e-13);
        }

        let k = position_ket(&s, 2);
        let proj = ComplexOperator::new(&k * k.adjoint(), BasisTag::Position(7)).unwrap();
        for (_, q, val) in weyl_symbol(&proj, &s).unwrap().entries() {
            let want = if q == 2 { 1.0 } else { 0.0 };
            assert!((val - C64::from(want)).norm() < 1e-14);
        }

        let delta_p0 = PhaseSpaceFunction::from_fn(&s, FunctionKind::Symbol, |p, _| if p == 0 { ONE } else { ZERO });
        let k0 = momentum_ket(&s, 0);
        let want = &k0 * k0.adjoint();
        assert!(max_abs(&(from_symbol(&delta_p0).unwrap().into_matrix() - want)) < 1e-13);
    }

    #[test]
    fn symbol_matches_trace_definition() {
        let s = sp(5);
        let a = random_operator(5, &mut rng(1));
        let sym = weyl_symbol(&a, &s).unwrap();
        for (p, q, val) in sym.entries() {
            let direct = a.compose(&delta_projector(&s, p, q).unwrap()).unwrap().trace();
            assert!((val - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_trace_product() {
        let mut r = rng(2);
        for n in [3u64, 5, 7, 11] {
            let s = sp(n);
            for _ in 0..5 {
                let a = random_operator(n as usize, &mut r);
                let back = from_symbol(&weyl_symbol(&a, &s).unwrap()).unwrap();
                assert!(back.max_diff(&a) < 1e-12);
            }
        }
        let s = sp(7);
        for _ in 0..10 {
            let a = random_operator(7, &mut r);
            let b = random_operator(7, &mut r);
            let (sa, sb) = (weyl_symbol(&a, &s).unwrap(), weyl_symbol(&b, &s).unwrap());
            let lhs = a.compose(&b).unwrap().trace();
            let rhs: C64 = sa.grid().iter().zip(sb.grid().iter()).map(|(x, y)| x * y).sum::<C64>() / 7.0;
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn translation_covariance_and_hermiticity() {
        let s = sp(5);
        let a = random_operator(5, &mut rng(3));
        let sa = weyl_symbol(&a, &s).unwrap();
        for shift in -2..=2 {
            let x = shift_x(&s, shift);
            let moved = x.compose(&a).unwrap().compose(&x.dagger()).unwrap();
            let sm = weyl_symbol(&moved, &s).unwrap();
            for (p, q, val) in sm.entries() {
                assert!((val - sa.at(p, q - shift)).norm() < 1e-12);
            }
        }
        let h = a.add(&a.dagger()).unwrap();
        assert!(weyl_symbol(&h, &s).unwrap().max_imag() < 1e-12);
        assert!(sa.max_imag() > 1e-3);
    }

    #[test]
    fn wigner_examples() {
        let s = sp(7);
        let mixed = ComplexOperator::identity(BasisTag::Position(7)).scale(C64::from(1.0 / 7.0));
        let w = wigner_function(&mixed, &s).unwrap();
        assert!(w.grid().iter().all(|z| (z - C64::from(1.0 / 49.0)).norm() < 1e-15));

        let k = position_ket(&s, 0);
        let w = wigner_function(&ComplexOperator::new(&k * k.adjoint(), BasisTag::Position(7)).unwrap(), &s).unwrap();
        for (_, q, val) in w.entries() {
            let want = if q == 0 { 1.0 / 7.0 } else { 0.0 };
            assert!((val - C64::from(want)).norm() < 1e-15);
        }

        let k = momentum_ket(&s, 3);
        let w = wigner_function(&ComplexOperator::new(&k * k.adjoint(), BasisTag::Position(7)).unwrap(), &s).unwrap();
        for (p, _, val) in w.entries() {
            let want = if p == 3 { 1.0 / 7.0 } else { 0.0 };
            assert!((val - C64::from(want)).norm() < 1e-13);
        }

        let bad = ComplexOperator::identity(BasisTag::Position(7));
        assert!(matches!(wigner_function(&bad, &s), Err(Error::NotDensityMatrix(_))));
    }

    #[test]
    fn wigner_marginals() {
        let s = sp(7);
        let f = dft_matrix(&s);
        let rho = random_density(7, &mut rng(4));
        let w = wigner_function(&rho, &s).unwrap();
        assert!((w.sum() - ONE).norm() < 1e-12);
        assert!(w.max_imag() < 1e-12);
        let rho_p = f.dagger().compose(&rho).unwrap().compose(&f).unwrap();
        for i in 0..7 {
            let q_marg: C64 = (0..7).map(|p| w.grid()[(p, i)]).sum();
            let p_marg: C64 = (0..7).map(|q| w.grid()[(i, q)]).sum();
            assert!((q_marg - rho.get(i, i)).norm() < 1e-12);
            assert!((p_marg - rho_p.get(i, i)).norm() < 1e-12);
        }
    }

    #[test]
    fn characteristic_orderings() {
        for n in [3u64, 5] {
            let s = sp(n);
            let a = random_operator(n as usize, &mut rng(5));
            let cw = characteristic(&a, &s, OperatorOrdering::Weyl).unwrap();
            let cn = characteristic(&a, &s, OperatorOrdering::Normal).unwrap();
            let ca = characteristic(&a, &s, OperatorOrdering::Antinormal).unwrap();
            for (u, v, val) in cw.entries() {
                assert!((cn.at(u, v) - s.omega(-2 * u * v) * val).norm() < 1e-12);
                assert!((ca.at(u, v) - s.omega(2 * u * v) * val).norm() < 1e-12);
                let y = displacement(&s, 2 * u, 2 * v).unwrap();
                assert!((a.compose(&y).unwrap().trace() - val).norm() < 1e-12);
            }
        }
        let s = sp(5);
        let id = ComplexOperator::identity(BasisTag::Position(5));
        for (u, v, val) in characteristic(&id, &s, OperatorOrdering::Weyl).unwrap().entries() {
            let want = if u == 0 && v == 0 { 5.0 } else { 0.0 };
            assert!((val - C64::from(want)).norm() < 1e-13);
        }
    }

    #[test]
    fn symplectic_pairing() {
        let s = sp(3);
        let a = random_operator(3, &mut rng(6));
        let chr = characteristic(&a, &s, OperatorOrdering::Weyl).unwrap();
        let back = symbol_from_characteristic(&chr).unwrap();
        assert!(back.max_diff(&weyl_symbol(&a, &s).unwrap()) < 1e-12);
        for p in -1..=1 {
            for q in -1..=1 {
                let d = delta_projector(&s, p, q).unwrap();
                for u in -1..=1 {
                    for v in -1..=1 {
                        let tr = d.compose(&displacement(&s, 2 * u, 2 * v).unwrap()).unwrap().trace();
                        assert!((tr - s.omega(-2 * (p * v - q * u))).norm() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn smoothing() {
        let s = sp(3);
        let a = random_operator(3, &mut rng(7));
        let plain = smoothed_distribution(&a, &s, |_, _| ONE, "one").unwrap();
        assert!(plain.max_diff(&weyl_symbol(&a, &s).unwrap()) < 1e-12);
        let zero = smoothed_distribution(&a, &s, |_, _| ZERO, "zero").unwrap();
        assert!(zero.grid().iter().all(|z| *z == ZERO));
        let normal = smoothed_distribution(&a, &s, |u, v| s.omega(-2 * u * v), "normal").unwrap();
        let cn = characteristic(&a, &s, OperatorOrdering::Normal).unwrap();
        for (p, q, val) in normal.entries() {
            let mut direct = ZERO;
            for (u, v, c) in cn.entries() {
                direct += c * s.omega(2 * (p * v - q * u));
            }
            assert!((val - direct / 3.0).norm() < 1e-12);
        }
    }

    #[test]
    fn qubit_ops() {
        let (x, z, h) = qubit_paulis();
        let id = ComplexOperator::identity(BasisTag::Position(2));
        assert!(h.pow(2).max_diff(&id) < 1e-15);
        assert!(h.compose(&z).unwrap().compose(&h).unwrap().max_diff(&x) < 1e-15);
        assert!(anticommutator(&x, &z).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn policies_agree() {
        let s = sp(11);
        let a = random_operator(11, &mut rng(8));
        let seq = weyl_symbol_with(&a, &s, Execution::Sequential).unwrap();
        for &e in Execution::available() {
            assert_eq!(weyl_symbol_with(&a, &s, e).unwrap().grid(), seq.grid());
        }
    }

    #[test]
    fn kind_labels_round_trip() {
        for k in [
            FunctionKind::Symbol,
            FunctionKind::Wigner,
            FunctionKind::CharWeyl,
            FunctionKind::CharNormal,
            FunctionKind::CharAntinormal,
            FunctionKind::Smoothed("gauss".into()),
        ] {
            assert_eq!(FunctionKind::parse(&k.label()).unwrap(), k);
        }
    }
}
