use num_complex::Complex64;

use super::matrices::{alpha_dot_mul, alpha_mul, gamma0_mul};
use crate::error::{invalid, Result};
use crate::fourier::symbol::lambda_symbol;
use crate::fourier::{self, check_same, ScalarField, SpinorField, TwoSpinorField};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Positive or negative energy branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(invalid("eps", format!("must be positive (got {eps})")))
    }
}

/// Symbol of the free Dirac operator, `(εα·ξ + γ⁰) v`.
#[inline]
pub fn dirac_symbol_mul(eps: f64, xi: [f64; 3], v: [Complex64; 4]) -> [Complex64; 4] {
    let a = alpha_dot_mul([eps * xi[0], eps * xi[1], eps * xi[2]], v);
    let g = gamma0_mul(v);
    std::array::from_fn(|i| a[i] + g[i])
}

/// `Π^ε_± v` at a single frequency.
#[inline]
pub fn pi_eps_mode(eps: f64, xi: [f64; 3], branch: Branch, v: [Complex64; 4]) -> [Complex64; 4] {
    let q = dirac_symbol_mul(eps, xi, v);
    let k = branch.sign() / lambda_symbol(eps, xi);
    std::array::from_fn(|i| 0.5 * (v[i] + k * q[i]))
}

/// Spectral projection onto the positive or negative energy branch of the
/// free Dirac operator.
pub fn pi_eps(psi: &SpinorField, eps: f64, branch: Branch) -> Result<SpinorField> {
    check_eps(eps)?;
    Ok(psi.map_modes(|_, xi, v| pi_eps_mode(eps, xi, branch, v)))
}

/// `ε → 0` projections: keep the upper (`Plus`) or lower (`Minus`) 2-spinor.
pub fn pi_zero(psi: &SpinorField, branch: Branch) -> SpinorField {
    psi.map_points(|_, v| match branch {
        Branch::Plus => [v[0], v[1], ZERO, ZERO],
        Branch::Minus => [ZERO, ZERO, v[2], v[3]],
    })
}

/// `‖(Π^ε_± − Π⁰_±) f‖_{L²}` and `‖(Π^ε_± − Π⁰_± ± ½iεα^k∂_k) f‖_{L²}`.
///
/// The two norms do not depend on the branch since
/// `Π^ε_+ − Π⁰_+ = −(Π^ε_− − Π⁰_−)`.
pub fn projection_remainders(f: &SpinorField, eps: f64) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let first = f.map_modes(|_, xi, v| {
        let p = pi_eps_mode(eps, xi, Branch::Plus, v);
        [p[0] - v[0], p[1] - v[1], p[2], p[3]]
    });
    // ½iεα^k∂_k has symbol −½εα·ξ
    let second: SpinorField = f.map_modes(|_, xi, v| {
        let p = pi_eps_mode(eps, xi, Branch::Plus, v);
        let a = alpha_dot_mul(xi, v);
        let d = [p[0] - v[0], p[1] - v[1], p[2], p[3]];
        std::array::from_fn(|i| d[i] - 0.5 * eps * a[i])
    });
    Ok((fourier::l2_norm(&first), fourier::l2_norm(&second)))
}

/// Klein–Gordon splitting `ψ± = ½{ψ ± ε²λ⁻¹(i∂ₜψ + A₀ψ)}`.
pub fn kg_split(
    psi: &SpinorField,
    dt_psi: &SpinorField,
    a0: &ScalarField,
    eps: f64,
) -> Result<(SpinorField, SpinorField)> {
    check_eps(eps)?;
    check_same(psi.lattice(), dt_psi.lattice())?;
    check_same(psi.lattice(), a0.lattice())?;
    let w: SpinorField = psi.map_points(|i, v| {
        let d = dt_psi.at(i);
        let a = a0.comp(0)[i];
        std::array::from_fn(|c| I * d[c] + a * v[c])
    });
    let w = fourier::lambda_eps(&w, eps, -1)?;
    let e2 = eps * eps;
    let plus = psi.map_points(|i, v| std::array::from_fn(|c| 0.5 * (v[c] + e2 * w.comp(c)[i])));
    let minus = psi - &plus;
    Ok((plus, minus))
}

/// `φ± = e^{±it/ε²} ψ±`.
pub fn modulate(psi: &SpinorField, t: f64, eps: f64, branch: Branch) -> Result<SpinorField> {
    check_eps(eps)?;
    let phase = Complex64::from_polar(1.0, branch.sign() * t / (eps * eps));
    Ok(psi.scale(phase))
}

pub fn upper(psi: &SpinorField) -> TwoSpinorField {
    psi.map_points(|_, v| [v[0], v[1]])
}

pub fn lower(psi: &SpinorField) -> TwoSpinorField {
    psi.map_points(|_, v| [v[2], v[3]])
}

/// `χ ↦ (χ, 0)`.
pub fn embed_upper(chi: &TwoSpinorField) -> SpinorField {
    chi.map_points(|_, v| [v[0], v[1], ZERO, ZERO])
}

/// `η ↦ (0, η)`.
pub fn embed_lower(eta: &TwoSpinorField) -> SpinorField {
    eta.map_points(|_, v| [ZERO, ZERO, v[0], v[1]])
}

/// `(α·∇) ψ` computed spectrally.
pub fn alpha_grad(psi: &SpinorField) -> SpinorField {
    psi.map_modes(|_, xi, v| {
        let a = alpha_dot_mul(xi, v);
        a.map(|z| I * z)
    })
}

/// `α^j ψ` pointwise.
pub fn alpha_field(j: usize, psi: &SpinorField) -> SpinorField {
    psi.map_points(|_, v| alpha_mul(j, v))
}
