use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix4;
use num_complex::Complex64;

type ScalarFn = dyn Fn([f64; 3]) -> Complex64 + Send + Sync;
type MatrixFn = dyn Fn([f64; 3]) -> Matrix4<Complex64> + Send + Sync;

#[inline]
pub fn norm2(xi: [f64; 3]) -> f64 {
    xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]
}

/// `λ^ε(ξ) = √(1 + ε²|ξ|²)`.
#[inline]
pub fn lambda_symbol(eps: f64, xi: [f64; 3]) -> f64 {
    (1.0 + eps * eps * norm2(xi)).sqrt()
}

/// `h_ε(ξ) = |ξ|² / (1 + √(1 + ε²|ξ|²))`, the symbol of `(λ^ε − 1)/ε²`.
/// At `ε = 0` this is `|ξ|²/2`.
#[inline]
pub fn h_symbol(eps: f64, xi: [f64; 3]) -> f64 {
    let k2 = norm2(xi);
    k2 / (1.0 + (1.0 + eps * eps * k2).sqrt())
}

/// Smooth radial cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`, `C^∞` in between.
pub fn lp_cutoff(r: f64) -> f64 {
    fn g(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-1.0 / x).exp()
        }
    }
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = g(2.0 - r);
        a / (a + g(r - 1.0))
    }
}

/// Littlewood–Paley bump `β(r) = χ(r) − χ(2r)`, supported in `1/2 < r < 2`.
/// Dyadic dilates telescope: `Σ_j β(r/2^j) = 1` for `r > 0`.
pub fn lp_bump(r: f64) -> f64 {
    lp_cutoff(r) - lp_cutoff(2.0 * r)
}

/// Scalar Fourier multiplier `ξ ↦ m(ξ)` with a display name.
#[derive(Clone)]
pub struct SymbolSpec {
    name: String,
    f: Arc<ScalarFn>,
}

impl fmt::Debug for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymbolSpec({})", self.name)
    }
}

impl SymbolSpec {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn([f64; 3]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn real<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, move |xi| Complex64::new(f(xi), 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, xi: [f64; 3]) -> Complex64 {
        (self.f)(xi)
    }

    pub fn identity() -> Self {
        Self::real("1", |_| 1.0)
    }

    /// `|ξ|²` (the symbol of `−Δ`).
    pub fn minus_laplacian() -> Self {
        Self::real("|xi|^2", norm2)
    }

    /// `|ξ|^s`, with the value at `ξ = 0` set to 0.
    pub fn abs_pow(s: f64) -> Self {
        Self::real(format!("|xi|^{s}"), move |xi| {
            let k2 = norm2(xi);
            if k2 == 0.0 {
                0.0
            } else {
                k2.powf(0.5 * s)
            }
        })
    }

    /// `⟨ξ⟩^s = (1 + |ξ|²)^{s/2}`.
    pub fn bracket_pow(s: f64) -> Self {
        Self::real(format!("<xi>^{s}"), move |xi| (1.0 + norm2(xi)).powf(0.5 * s))
    }

    /// `(λ^ε)^{±1}`.
    pub fn lambda(eps: f64, power: i32) -> Self {
        Self::real(format!("lambda_eps^{power}(eps={eps})"), move |xi| {
            lambda_symbol(eps, xi).powi(power)
        })
    }

    pub fn h_eps(eps: f64) -> Self {
        Self::real(format!("h_eps(eps={eps})"), move |xi| h_symbol(eps, xi))
    }

    /// `i ξ_j`, the symbol of `∂_j`.
    pub fn derivative(axis: usize) -> Self {
        Self::new(format!("d/dx{}", axis + 1), move |xi| Complex64::new(0.0, xi[axis]))
    }
}

/// 4×4-matrix-valued multiplier acting on spinor fields.
#[derive(Clone)]
pub struct MatrixSymbol {
    name: String,
    f: Arc<MatrixFn>,
}

impl fmt::Debug for MatrixSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixSymbol({})", self.name)
    }
}

impl MatrixSymbol {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn([f64; 3]) -> Matrix4<Complex64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, xi: [f64; 3]) -> Matrix4<Complex64> {
        (self.f)(xi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_and_bump_shape() {
        assert_eq!(lp_cutoff(0.3), 1.0);
        assert_eq!(lp_cutoff(1.0), 1.0);
        assert_eq!(lp_cutoff(2.0), 0.0);
        assert!((lp_cutoff(1.5) - 0.5).abs() < 1e-15);
        assert_eq!(lp_bump(0.5), 0.0);
        assert_eq!(lp_bump(2.0), 0.0);
        assert_eq!(lp_bump(1.0), 1.0);
        for r in [0.6, 0.9, 1.3, 1.9] {
            let b = lp_bump(r);
            assert!((0.0..=1.0).contains(&b));
        }
    }

    #[test]
    fn dyadic_bumps_resum_to_one() {
        for r in [0.013, 0.4, 1.0, 3.0, 7.7, 100.0] {
            let s: f64 = (-10..=10).map(|j| lp_bump(r / 2f64.powi(j))).sum();
            assert!((s - 1.0).abs() < 1e-14, "r = {r}: {s}");
        }
    }

    #[test]
    fn h_symbol_values() {
        assert!((h_symbol(0.0, [1.0, 0.0, 0.0]) - 0.5).abs() < 1e-15);
        assert!((h_symbol(1.0, [1.0, 0.0, 0.0]) - 1.0 / (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(h_symbol(0.7, [0.0; 3]), 0.0);
        // (λ − 1)/ε² written without cancellation
        let xi = [0.3, -1.2, 2.0];
        let eps = 0.8;
        let direct = (lambda_symbol(eps, xi) - 1.0) / (eps * eps);
        assert!((h_symbol(eps, xi) - direct).abs() < 1e-12);
    }
}
