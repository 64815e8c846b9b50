use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "weyl-lattice", about = "Batch front end for lattice phase-space, second-quantization and Dirac computations")]
#[command(disable_version_flag = true)]
pub struct Cli {
    /// JSON object whose keys mirror the subcommand's flags. Flags on the
    /// command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file (written atomically); stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ordering {
    Weyl,
    Normal,
    Antinormal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wigner function W(p,q) of a lattice state.
    Wigner {
        #[arg(long)]
        n: u64,
        /// q<k>, p<k> or mixed.
        #[arg(long)]
        state: String,
        #[command(flatten)]
        output: Output,
    },
    /// Characteristic function of a lattice operator.
    Char {
        #[arg(long)]
        n: u64,
        /// identity, clock, shift, parity, mixed, q<k> or p<k>.
        #[arg(long)]
        op: String,
        #[arg(long, value_enum, default_value = "weyl")]
        ordering: Ordering,
        #[command(flatten)]
        output: Output,
    },
    /// g-smoothed distribution of a lattice operator.
    Smoothed {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        op: String,
        /// one, zero, normal, antinormal or gauss:<width>.
        #[arg(long, default_value = "one")]
        g: String,
        #[command(flatten)]
        output: Output,
    },
    /// Displacement Y(u,v), or a qubit Pauli/Hadamard at N = 2.
    Qudit {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        u: i64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        v: i64,
        /// x, z or h; only for N = 2.
        #[arg(long)]
        pauli: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Open XX chain by exact diagonalization and by free fermions.
    XxChain {
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        j: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Bosonic or fermionic Bogoliubov transformation.
    Bogoliubov {
        #[arg(long, value_enum, default_value = "boson")]
        kind: BogoliubovKind,
        #[arg(long, default_value_t = 1.0)]
        e: f64,
        #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
        g: f64,
        #[arg(long, default_value_t = 30)]
        cutoff: usize,
        #[arg(long, allow_negative_numbers = true)]
        u: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        v: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Transfer-matrix propagator Tⁿ against exp(−iHt) or exp(−βH).
    Propagator {
        #[arg(long, default_value_t = 7)]
        n: u64,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        #[arg(long, default_value_t = 128)]
        steps: u32,
        #[arg(long, value_enum, default_value = "real")]
        mode: Mode,
        #[command(flatten)]
        hamiltonian: HamiltonianArgs,
        /// JSON job {N, H, t, n, mode} with H as row-major [re, im] pairs;
        /// replaces the flags above.
        #[arg(long, value_name = "PATH")]
        job: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Imaginary-time trace Tr Tⁿ against Tr exp(−βH).
    Partition {
        #[arg(long, default_value_t = 7)]
        n: u64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, default_value_t = 256)]
        steps: u32,
        #[command(flatten)]
        hamiltonian: HamiltonianArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Husimi Q function of a coherent state on a square α grid.
    Husimi {
        #[arg(long, default_value_t = 40)]
        cutoff: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha_im: f64,
        /// Half width of the grid in both directions.
        #[arg(long, default_value_t = 3.0)]
        extent: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Foldy-Wouthuysen diagonalization at one momentum.
    DiracFw {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        kx: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        ky: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        kz: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda_prime: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Orbital and spin susceptibility sweep over log-spaced x = k_F/mc.
    Susceptibility {
        #[arg(long, default_value_t = 0.01)]
        x_min: f64,
        #[arg(long, default_value_t = 1000.0)]
        x_max: f64,
        #[arg(long, default_value_t = 60)]
        points: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda_prime: f64,
        /// Temperature in units of mc².
        #[arg(long, default_value_t = 0.0)]
        t_red: f64,
        #[arg(long)]
        holes: bool,
        /// Limit-check sidecar; defaults to <out>.limits.json.
        #[arg(long, value_name = "PATH")]
        limits: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Berezin integration rules, Gaussian integrals and coherent-state resolution.
    GrassmannCheck {
        #[arg(long, default_value_t = 2)]
        modes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Magnetic translation T(a) on an L×L torus with flux p/q.
    MagTranslate {
        #[arg(long, default_value_t = 4)]
        l: usize,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        p: i64,
        #[arg(long, default_value_t = 4)]
        q: u64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        ax: i64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        ay: i64,
        #[command(flatten)]
        output: Output,
    },
    /// Invariant suite; exit 1 names the first failure.
    Selftest {
        /// Module substring or check id.
        #[arg(long)]
        only: Option<String>,
        /// Perturbs one root of unity so the lattice check must fail.
        #[arg(long)]
        inject_fault: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Real,
    Matsubara,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BogoliubovKind {
    Boson,
    Fermion,
}

/// `−hop (X + X†) + amplitude·cos(2πq/N)`.
#[derive(Debug, Args)]
pub struct HamiltonianArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub hop: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub potential: f64,
}
