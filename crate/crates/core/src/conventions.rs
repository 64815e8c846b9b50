//! The sign and phase conventions every output depends on. The CLI prints
//! a hash of this text with `--version`, so stored fixtures can detect a
//! convention change.

use sha2::{Digest, Sha256};

pub const CONVENTIONS: &str = "\
omega = exp(2 pi i / N); residues symmetric in [-(N-1)/2, (N-1)/2]
<q|p> = N^(-1/2) omega^(p q); X|q> = |q+1>; Z|q> = omega^q |q>
Y(u,v) = omega^(u v / 2) X^v Z^u
Delta(p,q)[q+v, q-v] = omega^(2 p v); A(p,q) = Tr(A Delta(p,q)); W = A(p,q)/N
char_weyl(u,v) = Tr(A Y(2u,2v)); normal = omega^(-2uv) char_weyl; antinormal = omega^(2uv) char_weyl
Fock: a|n> = sqrt(n)|n-1>; Q = (a + a^dag)/sqrt2; P = (a - a^dag)/(i sqrt2); D(xi) = exp(xi a^dag - conj(xi) a)
Berezin: integral d theta_k acts from the left after moving theta_k to the front; bit i = generator i
Jordan-Wigner: a_j = prod_{k<j}(-sigma_z^k) sigma^-_j with a^dag a = (1 + sigma_z)/2
path integral: T[q',q] = (1/N) sum_p omega^(p(q'-q)) exp(f H(p,(q'+q)/2)), f = -i eps or -eps
Dirac: beta = diag(1,1,-1,-1); alpha = offdiag(sigma, sigma); hbar = c = mc^2 = 1; chi in e^2/(hbar c)
magnetic translations: Landau gauge, T(a) = exp(-i B a_x a_y / 2) t_x^a_x t_y^a_y, B = 2 pi p/q
";

/// Hex SHA-256 of [`CONVENTIONS`], truncated to 16 digits.
pub fn conventions_hash() -> String {
    let digest = Sha256::digest(CONVENTIONS.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
