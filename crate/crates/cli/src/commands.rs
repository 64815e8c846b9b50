use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use weyl_lattice::dirac::{self, magnetic, susceptibility};
use weyl_lattice::exec::Execution;
use weyl_lattice::fock::{self, AlphaGrid, FockSpace};
use weyl_lattice::grassmann::{self, GrassmannAlgebra, GrassmannElement};
use weyl_lattice::lattice::{momentum_ket, parity, position_ket, PrimePhaseSpace};
use weyl_lattice::operator::{BasisTag, ComplexOperator};
use weyl_lattice::path_integral::{self, PropagatorJob, TimeMode};
use weyl_lattice::sample::rng;
use weyl_lattice::selftest::{self, SelftestOptions};
use weyl_lattice::transform;
use weyl_lattice::weyl::{self, OperatorOrdering};

use crate::args::{BogoliubovKind, Command, Format, HamiltonianArgs, Mode, Ordering, Output};
use crate::failure::{Failure, EXIT_SELFTEST};
use crate::output::{emit, json_text, matrix_csv, matrix_json, summary_csv, write_atomic};

type Res<T> = Result<T, Failure>;

/// Runs one job and returns the process exit code.
pub fn run(command: Command) -> Res<u8> {
    match command {
        Command::Wigner { n, state, output } => {
            let space = PrimePhaseSpace::new(n)?;
            let rho = lattice_operator(&space, &state)?;
            let w = weyl::wigner_function(&rho, &space)?;
            grid_out(&output, w.to_csv(), w.to_json())
        }
        Command::Char { n, op, ordering, output } => {
            let space = PrimePhaseSpace::new(n)?;
            let a = lattice_operator(&space, &op)?;
            let ord = match ordering {
                Ordering::Weyl => OperatorOrdering::Weyl,
                Ordering::Normal => OperatorOrdering::Normal,
                Ordering::Antinormal => OperatorOrdering::Antinormal,
            };
            let c = weyl::characteristic(&a, &space, ord)?;
            grid_out(&output, c.to_csv(), c.to_json())
        }
        Command::Smoothed { n, op, g, output } => {
            let space = PrimePhaseSpace::new(n)?;
            let a = lattice_operator(&space, &op)?;
            let f = smoothing(&space, &g)?;
            let s = weyl::smoothed_distribution(&a, &space, f, &g)?;
            grid_out(&output, s.to_csv(), s.to_json())
        }
        Command::Qudit { n, u, v, pauli, output } => qudit(n, u, v, pauli.as_deref(), &output),
        Command::XxChain { l, j, output } => {
            let s = transform::solve_xx_chain(l, j)?;
            let free = transform::subset_sums(&s.single_particle);
            let mut csv = String::from("level,many_body,free_fermion\n");
            for (k, (a, b)) in s.many_body.iter().zip(&free).enumerate() {
                csv.push_str(&format!("{k},{},{}\n", fmt(*a), fmt(*b)));
            }
            let v = json!({
                "L": s.length,
                "J": s.coupling,
                "ground_energy": s.ground_energy,
                "max_deviation": s.max_deviation,
                "verified": s.verified,
                "single_particle": s.single_particle,
                "many_body": s.many_body,
            });
            write_out(&output, Format::Json, csv, json_text(&v))
        }
        Command::Bogoliubov { kind, e, g, cutoff, u, v, output } => {
            let value = match kind {
                BogoliubovKind::Boson => {
                    let b = transform::bogoliubov_boson(e, g, cutoff)?;
                    json!({
                        "kind": "boson",
                        "e": e,
                        "g": g,
                        "cutoff": cutoff,
                        "r": b.r,
                        "u": b.u,
                        "v": b.v,
                        "quasiparticle_gap": b.quasiparticle_gap,
                        "ground_energy": b.ground_energy,
                        "low_levels": b.low_levels,
                        "spacing_error": b.spacing_error,
                    })
                }
                BogoliubovKind::Fermion => {
                    let (Some(u), Some(v)) = (u, v) else {
                        return Err(Failure::validation("fermionic Bogoliubov needs --u and --v"));
                    };
                    let ops = transform::bogoliubov_fermion(u, v)?;
                    json!({ "kind": "fermion", "u": u, "v": v, "car_defect": transform::car_defect(&ops) })
                }
            };
            summary_out(&output, &value)
        }
        Command::Propagator { n, time, steps, mode, hamiltonian, job, output } => {
            let (space, h, time, steps, mode) = match job {
                Some(path) => read_job(&path)?,
                None => {
                    let space = PrimePhaseSpace::new(n)?;
                    let h = hamiltonian_of(&space, &hamiltonian);
                    (space, h, time, steps, mode)
                }
            };
            let time_mode = match mode {
                Mode::Real => TimeMode::RealTime,
                Mode::Matsubara => TimeMode::Matsubara,
            };
            let job = PropagatorJob::new(&space, h, time, steps, time_mode)?;
            let k = path_integral::propagate(&job);
            // The dense exponential is only worth it on small lattices.
            let error = if space.modulus() <= 11 { json!(path_integral::propagation_error(&job)?) } else { Value::Null };
            let v = json!({
                "N": space.modulus(),
                "t": time,
                "n": steps,
                "mode": match mode { Mode::Real => "real", Mode::Matsubara => "matsubara" },
                "epsilon": job.epsilon(),
                "error_vs_exact": error,
                "unitarity_defect": k.unitarity_defect(),
                "K": matrix_json("K", k.matrix()),
            });
            write_out(&output, Format::Json, matrix_csv(k.matrix()), json_text(&v))
        }
        Command::Partition { n, beta, steps, hamiltonian, output } => {
            let space = PrimePhaseSpace::new(n)?;
            let job = PropagatorJob::new(&space, hamiltonian_of(&space, &hamiltonian), beta, steps, TimeMode::Matsubara)?;
            let z = path_integral::matsubara_trace(&job)?;
            let exact = path_integral::exact_partition_function(&job);
            let v = json!({
                "n": n,
                "beta": beta,
                "steps": steps,
                "z_lattice_re": z.re,
                "z_lattice_im": z.im,
                "z_exact": exact,
                "abs_error": (z - exact).norm(),
            });
            summary_out(&output, &v)
        }
        Command::Husimi { cutoff, alpha_re, alpha_im, extent, points, output } => {
            let f = FockSpace::new(cutoff)?;
            let state = fock::coherent_state(&f, Complex64::new(alpha_re, alpha_im))?;
            let grid = AlphaGrid::uniform((-extent, extent), points, (-extent, extent), points)?;
            let q = fock::husimi_q(&state.projector(&f), &f, &grid)?;
            grid_out(&output, q.to_csv(), q.to_json())
        }
        Command::DiracFw { kx, ky, kz, m, lambda_prime, output } => {
            let k = [kx, ky, kz];
            let c = dirac::fw_check(k, m)?;
            let v = json!({
                "k": k,
                "m": m,
                "lambda_prime": lambda_prime,
                "energy": c.energy,
                "even_form_defect": c.even_form_defect,
                "odd_part": c.odd_part,
                "unitarity_defect": c.unitarity_defect,
                "rotation_cosine": c.rotation_cosine,
                "m_over_energy": m / c.energy,
                "charge_spread": dirac::charge_spread(k, lambda_prime)?,
            });
            summary_out(&output, &v)
        }
        Command::Susceptibility { x_min, x_max, points, lambda_prime, t_red, holes, limits, output } => {
            susceptibility_job(x_min, x_max, points, lambda_prime, t_red, holes, limits, &output)
        }
        Command::GrassmannCheck { modes, seed, output } => {
            let v = grassmann_check(modes, seed)?;
            summary_out(&output, &v)
        }
        Command::MagTranslate { l, p, q, ax, ay, output } => mag_translate(l, p, q, (ax, ay), &output),
        Command::Selftest { only, inject_fault } => {
            let report = selftest::run(&SelftestOptions { only, corrupt_roots: inject_fault });
            if report.rows.is_empty() {
                return Err(Failure::validation("--only matched no checks"));
            }
            emit(None, &report.render())?;
            match report.first_failure() {
                None => Ok(0),
                Some(row) => {
                    let f = Failure {
                        error: "selftest",
                        exit_code: EXIT_SELFTEST,
                        message: format!("first failure: {} ({})", row.name, row.id),
                    };
                    eprintln!("{}", f.to_line());
                    Ok(EXIT_SELFTEST)
                }
            }
        }
    }
}

fn fmt(x: f64) -> String {
    weyl_lattice::gridio::fmt_f64(x)
}

fn write_out(output: &Output, default: Format, csv: String, json: String) -> Res<u8> {
    let text = match output.format.unwrap_or(default) {
        Format::Csv => csv,
        Format::Json => json,
    };
    emit(output.out.as_deref(), &text)?;
    Ok(0)
}

fn grid_out(output: &Output, csv: String, json: String) -> Res<u8> {
    write_out(output, Format::Csv, csv, json)
}

fn summary_out(output: &Output, v: &Value) -> Res<u8> {
    write_out(output, Format::Json, summary_csv(v), json_text(v))
}

fn index_arg(spec: &str, prefix: char) -> Option<Res<i64>> {
    let rest = spec.strip_prefix(prefix)?;
    Some(rest.parse::<i64>().map_err(|_| Failure::validation(format!("bad index in {spec:?}"))))
}

/// `identity`, `clock`, `shift`, `parity`, `mixed`, `q<k>` or `p<k>`.
fn lattice_operator(space: &PrimePhaseSpace, spec: &str) -> Res<ComplexOperator> {
    let n = space.modulus();
    let tag = BasisTag::Position(n);
    let projector = |ket: nalgebra::DVector<Complex64>| ComplexOperator::new(&ket * ket.adjoint(), tag.clone());
    Ok(match spec {
        "identity" => ComplexOperator::identity(tag),
        "mixed" => ComplexOperator::identity(tag).scale(Complex64::from(1.0 / n as f64)),
        "clock" => weyl::clock_z(space, 1),
        "shift" => weyl::shift_x(space, 1),
        "parity" => parity(space),
        _ => {
            if let Some(q) = index_arg(spec, 'q') {
                projector(position_ket(space, q?))?
            } else if let Some(p) = index_arg(spec, 'p') {
                projector(momentum_ket(space, p?))?
            } else {
                return Err(Failure::validation(format!(
                    "unknown operator {spec:?}; expected identity, clock, shift, parity, mixed, q<k> or p<k>"
                )));
            }
        }
    })
}

type Smoothing = Box<dyn Fn(i64, i64) -> Complex64 + Sync>;

/// `one`, `zero`, `normal` (ω^{−2uv}), `antinormal` (ω^{2uv}) or `gauss:<w>`.
fn smoothing(space: &PrimePhaseSpace, spec: &str) -> Res<Smoothing> {
    let s = space.clone();
    Ok(match spec {
        "one" => Box::new(|_, _| Complex64::new(1.0, 0.0)),
        "zero" => Box::new(|_, _| Complex64::new(0.0, 0.0)),
        "normal" => Box::new(move |u, v| s.omega(-2 * u * v)),
        "antinormal" => Box::new(move |u, v| s.omega(2 * u * v)),
        _ => {
            let w = spec
                .strip_prefix("gauss:")
                .and_then(|w| w.parse::<f64>().ok())
                .filter(|w| *w > 0.0 && w.is_finite())
                .ok_or_else(|| Failure::validation(format!("unknown smoothing {spec:?}")))?;
            Box::new(move |u, v| Complex64::from((-((u * u + v * v) as f64) / (w * w)).exp()))
        }
    })
}

fn qudit(n: u64, u: i64, v: i64, pauli: Option<&str>, output: &Output) -> Res<u8> {
    let (label, op) = if n == 2 {
        let (x, z, h) = weyl::qubit_paulis();
        match pauli {
            Some("x") => ("X".to_string(), x),
            Some("z") => ("Z".to_string(), z),
            Some("h") => ("H".to_string(), h),
            _ => return Err(Failure::validation("N = 2 has no Y(u,v); pass --pauli x, z or h")),
        }
    } else {
        if pauli.is_some() {
            return Err(Failure::validation("--pauli is only meaningful for N = 2"));
        }
        let space = PrimePhaseSpace::new(n)?;
        (format!("Y({u},{v})"), weyl::displacement(&space, u, v)?)
    };
    let v = matrix_json(&label, op.matrix());
    write_out(output, Format::Csv, matrix_csv(op.matrix()), json_text(&v))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct JobFile {
    #[serde(rename = "N")]
    modulus: u64,
    #[serde(rename = "H")]
    hamiltonian: Vec<[f64; 2]>,
    t: f64,
    n: u32,
    #[serde(default)]
    mode: Option<String>,
}

fn read_job(path: &Path) -> Res<(PrimePhaseSpace, ComplexOperator, f64, u32, Mode)> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::validation(format!("cannot read job {}: {e}", path.display())))?;
    let job: JobFile = serde_json::from_str(&text).map_err(|e| Failure::validation(format!("bad job file: {e}")))?;
    let space = PrimePhaseSpace::new(job.modulus)?;
    let n = space.modulus();
    if job.hamiltonian.len() != n * n {
        return Err(Failure::validation(format!("H has {} entries, expected {}", job.hamiltonian.len(), n * n)));
    }
    let m = DMatrix::from_row_iterator(n, n, job.hamiltonian.iter().map(|&[re, im]| Complex64::new(re, im)));
    let h = ComplexOperator::new(m, BasisTag::Position(n))?;
    let mode = match job.mode.as_deref() {
        None | Some("real") => Mode::Real,
        Some("matsubara") => Mode::Matsubara,
        Some(other) => return Err(Failure::validation(format!("unknown mode {other:?}"))),
    };
    Ok((space, h, job.t, job.n, mode))
}

fn hamiltonian_of(space: &PrimePhaseSpace, h: &HamiltonianArgs) -> ComplexOperator {
    let n = space.modulus() as f64;
    let amp = h.potential;
    path_integral::hopping_hamiltonian(space, h.hop, |q| amp * (std::f64::consts::TAU * q as f64 / n).cos())
}

#[allow(clippy::too_many_arguments)]
fn susceptibility_job(
    x_min: f64,
    x_max: f64,
    points: usize,
    lambda_prime: f64,
    t_red: f64,
    holes: bool,
    limits: Option<PathBuf>,
    output: &Output,
) -> Res<u8> {
    let xs = susceptibility::log_grid(x_min, x_max, points)?;
    let rows = susceptibility::chi_sweep(&xs, lambda_prime, t_red, holes, Execution::default())?;
    let checks = susceptibility::limit_checks(lambda_prime)?;

    let mut csv = String::from("x,chi_LP,chi_P,chi_sp,chi_g,chi_MD,chi_total\n");
    for r in &rows {
        let c = &r.chi;
        let cells = [r.x, c.chi_lp, c.chi_p, c.chi_sp, c.chi_g, c.chi_md, c.chi_total].map(fmt);
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    let table = json!({
        "lambda_prime": lambda_prime,
        "t_red": t_red,
        "holes": holes,
        "rows": serde_json::to_value(&rows).expect("rows serialize"),
    });
    write_out(output, Format::Csv, csv, json_text(&table))?;

    let sidecar_path = limits.or_else(|| output.out.as_ref().map(|p| sidecar(p)));
    if let Some(path) = sidecar_path {
        let side = json!({
            "lambda_prime": lambda_prime,
            "all_pass": checks.iter().all(|c| c.pass),
            "checks": serde_json::to_value(&checks).expect("checks serialize"),
        });
        write_atomic(&path, &json_text(&side))?;
    }
    Ok(0)
}

fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".limits.json");
    PathBuf::from(s)
}

fn grassmann_check(modes: usize, seed: u64) -> Res<Value> {
    if !(1..=3).contains(&modes) {
        return Err(Failure::validation(format!("--modes must be 1, 2 or 3, got {modes}")));
    }
    let alg = GrassmannAlgebra::new(1)?;
    let one = GrassmannElement::one(&alg);
    let theta = GrassmannElement::generator(&alg, 0)?;
    let int_one = one.berezin_integrate(0)?;
    let int_theta = theta.berezin_integrate(0)?;

    // Small integers keep the Berezin expansion and the determinant exact.
    let mut r = rng(seed);
    let a = DMatrix::from_fn(modes, modes, |_, _| {
        Complex64::new(r.gen_range(-4..=4) as f64, r.gen_range(-4..=4) as f64)
    });
    let berezin = grassmann::gaussian_berezin(&a)?;
    let det = a.determinant();
    Ok(json!({
        "modes": modes,
        "seed": seed,
        "integral_of_one_is_zero": int_one.is_zero(),
        "integral_of_theta_is_one": int_theta == one,
        "gaussian_re": berezin.re,
        "gaussian_im": berezin.im,
        "determinant_re": det.re,
        "determinant_im": det.im,
        "gaussian_vs_det": (berezin - det).norm(),
        "resolution_deviation": grassmann::fermion_cs_resolution_deviation(modes, true)?,
        "transition_deviation": grassmann::fermion_transition_deviation(modes, 1.0)?,
    }))
}

fn mag_translate(l: usize, p: i64, q: u64, a: (i64, i64), output: &Output) -> Res<u8> {
    let flux = magnetic::Flux::new(p, q)?;
    let t = magnetic::magnetic_translation(l, flux, a)?;
    let m = t.matrix();
    let mut csv = String::from("from_x,from_y,to_x,to_y,re,im\n");
    let mut entries = Vec::new();
    for col in 0..m.ncols() {
        for row in 0..m.nrows() {
            let z = m[(row, col)];
            if z.norm() > 0.0 {
                let (fx, fy, tx, ty) = (col % l, col / l, row % l, row / l);
                csv.push_str(&format!("{fx},{fy},{tx},{ty},{},{}\n", fmt(z.re), fmt(z.im)));
                entries.push(json!([fx, fy, tx, ty, z.re, z.im]));
            }
        }
    }
    // The all-pairs law check grows like L^10; skip it on large grids.
    let laws = if l <= 6 {
        let laws = magnetic::translation_laws(l, flux)?;
        json!({
            "composition_defect": laws.composition_defect,
            "commutator_defect": laws.commutator_defect,
            "inverse_defect": laws.inverse_defect,
            "pairs": laws.pairs,
        })
    } else {
        Value::Null
    };
    let v = json!({
        "l": l,
        "p": p,
        "q": q,
        "a": [a.0, a.1],
        "field": flux.field(),
        "laws": laws,
        "plaquette_defect": magnetic::plaquette_defect(l, flux)?,
        "entries": entries,
    });
    write_out(output, Format::Csv, csv, json_text(&v))
}
