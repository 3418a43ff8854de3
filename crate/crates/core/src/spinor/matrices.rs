use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

const O: Complex64 = Complex64::new(0.0, 0.0);
const E: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// The constant matrices of the Dirac–Pauli representation.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracMatrices {
    pub gamma0: Matrix4<Complex64>,
    /// `γ^j = γ⁰α^j`.
    pub gamma: [Matrix4<Complex64>; 3],
    pub alpha: [Matrix4<Complex64>; 3],
    pub sigma: [Matrix2<Complex64>; 3],
    /// `S^m = diag(σ^m, σ^m)`.
    pub spin: [Matrix4<Complex64>; 3],
}

pub fn pauli_matrices() -> [Matrix2<Complex64>; 3] {
    [
        Matrix2::new(O, E, E, O),
        Matrix2::new(O, -I, I, O),
        Matrix2::new(E, O, O, -E),
    ]
}

fn blocks(
    a: &Matrix2<Complex64>,
    b: &Matrix2<Complex64>,
    c: &Matrix2<Complex64>,
    d: &Matrix2<Complex64>,
) -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

pub fn dirac_matrices() -> DiracMatrices {
    let sigma = pauli_matrices();
    let id = Matrix2::identity();
    let z = Matrix2::zeros();
    let gamma0 = blocks(&id, &z, &z, &-id);
    let alpha = sigma.map(|s| blocks(&z, &s, &s, &z));
    let gamma = alpha.map(|a| gamma0 * a);
    let spin = sigma.map(|s| blocks(&s, &z, &z, &s));
    DiracMatrices {
        gamma0,
        gamma,
        alpha,
        sigma,
        spin,
    }
}

/// `σ^j v` without forming the matrix.
#[inline]
pub fn sigma_mul(j: usize, v: [Complex64; 2]) -> [Complex64; 2] {
    match j {
        0 => [v[1], v[0]],
        1 => [-I * v[1], I * v[0]],
        _ => [v[0], -v[1]],
    }
}

/// `α^j v`.
#[inline]
pub fn alpha_mul(j: usize, v: [Complex64; 4]) -> [Complex64; 4] {
    let lo = sigma_mul(j, [v[2], v[3]]);
    let up = sigma_mul(j, [v[0], v[1]]);
    [lo[0], lo[1], up[0], up[1]]
}

/// `S^j v`.
#[inline]
pub fn spin_mul(j: usize, v: [Complex64; 4]) -> [Complex64; 4] {
    let up = sigma_mul(j, [v[0], v[1]]);
    let lo = sigma_mul(j, [v[2], v[3]]);
    [up[0], up[1], lo[0], lo[1]]
}

#[inline]
pub fn gamma0_mul(v: [Complex64; 4]) -> [Complex64; 4] {
    [v[0], v[1], -v[2], -v[3]]
}

/// `(σ·b) v` for a real 3-vector `b`.
#[inline]
pub fn sigma_dot_mul(b: [f64; 3], v: [Complex64; 2]) -> [Complex64; 2] {
    [
        b[2] * v[0] + Complex64::new(b[0], -b[1]) * v[1],
        Complex64::new(b[0], b[1]) * v[0] - b[2] * v[1],
    ]
}

/// `(α·b) v` for a real 3-vector `b`.
#[inline]
pub fn alpha_dot_mul(b: [f64; 3], v: [Complex64; 4]) -> [Complex64; 4] {
    let lo = sigma_dot_mul(b, [v[2], v[3]]);
    let up = sigma_dot_mul(b, [v[0], v[1]]);
    [lo[0], lo[1], up[0], up[1]]
}

/// `⟨a, b⟩ = Σ a_i conj(b_i)`.
#[inline]
pub fn inner<const C: usize>(a: &[Complex64; C], b: &[Complex64; C]) -> Complex64 {
    let mut s = O;
    for i in 0..C {
        s += a[i] * b[i].conj();
    }
    s
}
