use nalgebra::Vector4;
use num_complex::Complex64;

use super::field::modewise;
use super::symbol::{h_symbol, lambda_symbol, lp_bump, lp_cutoff, norm2};
use super::{CField, Lattice, MatrixSymbol, ScalarField, SpinorField, SymbolSpec, VectorField};
use crate::error::{invalid, Result};
use crate::par;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Multiply every Fourier coefficient by `m(ξ)`.
pub fn apply_symbol<const C: usize>(f: &CField<C>, m: &SymbolSpec) -> CField<C> {
    f.map_modes(|_, xi, v| {
        let s = m.eval(xi);
        v.map(|z| z * s)
    })
}

/// Apply a 4×4 multiplier mode by mode.
pub fn apply_matrix_symbol(f: &SpinorField, m: &MatrixSymbol) -> SpinorField {
    f.map_modes(|_, xi, v| {
        let out = m.eval(xi) * Vector4::from(v);
        [out[0], out[1], out[2], out[3]]
    })
}

/// `(1 − ε²Δ)^{power/2}`, `power = ±1`.
pub fn lambda_eps<const C: usize>(f: &CField<C>, eps: f64, power: i32) -> Result<CField<C>> {
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("must be positive (got {eps})")));
    }
    if power != 1 && power != -1 {
        return Err(invalid("power", format!("must be +1 or -1 (got {power})")));
    }
    Ok(f.map_modes(|_, xi, v| {
        let s = lambda_symbol(eps, xi).powi(power);
        v.map(|z| z * s)
    }))
}

/// Multiplier `h_ε(ξ) = |ξ|²/(1 + √(1+ε²|ξ|²))`; `ε = 0` gives `−Δ/2`.
pub fn h_eps<const C: usize>(f: &CField<C>, eps: f64) -> Result<CField<C>> {
    if !(eps >= 0.0) {
        return Err(invalid("eps", format!("must be non-negative (got {eps})")));
    }
    Ok(f.map_modes(|_, xi, v| {
        let s = h_symbol(eps, xi);
        v.map(|z| z * s)
    }))
}

#[inline]
fn leray_mode(xi: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    let k2 = norm2(xi);
    if k2 == 0.0 {
        return v;
    }
    let dot = (xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2]) / k2;
    std::array::from_fn(|j| v[j] - xi[j] * dot)
}

/// Projection onto divergence-free fields, `I − ξξᵀ/|ξ|²` per mode.
pub fn leray_project(u: &VectorField) -> VectorField {
    u.map_modes(|_, xi, v| leray_mode(xi, v))
}

pub fn divergence(u: &VectorField) -> ScalarField {
    u.map_modes(|_, xi, v| [I * (xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2])])
}

/// Largest modulus of `iξ·û` over all modes.
pub fn divergence_defect(u: &VectorField) -> f64 {
    let l = u.lattice();
    let s = u.spectra();
    par::max_range(l.len(), |idx| {
        let xi = l.wavevector(idx);
        (xi[0] * s[0][idx] + xi[1] * s[1][idx] + xi[2] * s[2][idx]).norm()
    })
}

pub fn gradient(f: &ScalarField) -> VectorField {
    f.map_modes(|_, xi, [v]| std::array::from_fn(|j| I * xi[j] * v))
}

pub fn curl(u: &VectorField) -> VectorField {
    u.map_modes(|_, xi, v| {
        [
            I * (xi[1] * v[2] - xi[2] * v[1]),
            I * (xi[2] * v[0] - xi[0] * v[2]),
            I * (xi[0] * v[1] - xi[1] * v[0]),
        ]
    })
}

/// `∂_axis` of every component.
pub fn partial<const C: usize>(f: &CField<C>, axis: usize) -> CField<C> {
    f.map_modes(|_, xi, v| v.map(|z| I * xi[axis] * z))
}

/// `[∂₁f, ∂₂f, ∂₃f]` sharing one forward transform.
pub fn spinor_gradient<const C: usize>(f: &CField<C>) -> [CField<C>; 3] {
    let l = f.lattice();
    let s = f.spectra();
    std::array::from_fn(|axis| {
        let d = modewise(l, &s, |_, xi, v: [Complex64; C]| v.map(|z| I * xi[axis] * z));
        CField::from_spectra(l, d)
    })
}

/// Solve `ΔA₀ = ρ − mean(ρ)` with `Â₀(0) = 0`.
pub fn poisson_solve(rho: &ScalarField) -> ScalarField {
    rho.map_modes(|_, xi, [v]| {
        let k2 = norm2(xi);
        if k2 == 0.0 {
            [ZERO]
        } else {
            [-v / k2]
        }
    })
}

fn check_dyadic(mu: f64) -> Result<()> {
    let ok = mu > 0.0 && mu.is_finite() && {
        let j = mu.log2().round();
        (2f64.powf(j) - mu).abs() <= 1e-12 * mu
    };
    if ok {
        Ok(())
    } else {
        Err(invalid("mu", format!("must be an integer power of 2 (got {mu})")))
    }
}

/// Littlewood–Paley block `Δ_μ f`, symbol `β(|ξ|/μ)`.
pub fn littlewood_paley<const C: usize>(f: &CField<C>, mu: f64) -> Result<CField<C>> {
    check_dyadic(mu)?;
    Ok(f.map_modes(|_, xi, v| {
        let b = lp_bump(norm2(xi).sqrt() / mu);
        v.map(|z| z * b)
    }))
}

/// Dyadic `μ` whose blocks together cover every nonzero lattice frequency.
pub fn dyadic_range(lattice: &Lattice) -> Vec<f64> {
    let kmin = lattice.frequency_spacing();
    let kmax = kmin * (lattice.n() / 2) as f64 * 3f64.sqrt();
    let lo = kmin.log2().floor() as i32 - 1;
    let hi = kmax.log2().ceil() as i32 + 1;
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}

/// Smooth split at `|ξ| ≈ 1/ε`: the low part has symbol `χ(√2 ε|ξ|)`, which
/// is 1 for `|ξ| ≤ 1/(√2ε)` and 0 for `|ξ| ≥ √2/ε`. `low + high = f` exactly.
pub fn low_high_split<const C: usize>(f: &CField<C>, eps: f64) -> Result<(CField<C>, CField<C>)> {
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("must be positive (got {eps})")));
    }
    let l = f.lattice();
    let s = f.spectra();
    let low = modewise(l, &s, |_, xi, v: [Complex64; C]| {
        let m = lp_cutoff(std::f64::consts::SQRT_2 * eps * norm2(xi).sqrt());
        v.map(|z| z * m)
    });
    let low = CField::from_spectra(l, low);
    let high = f - &low;
    Ok((low, high))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::ComplexField;
    use std::f64::consts::PI;

    fn lat(n: usize) -> Lattice {
        Lattice::new(n, 2.0 * PI).unwrap()
    }

    fn wave(l: &Lattice, k: [f64; 3]) -> ComplexField {
        ComplexField::from_fn(l, |x| [Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2])])
    }

    fn close(a: &ComplexField, b: &ComplexField) -> f64 {
        a.max_abs_diff(b)
    }

    #[test]
    fn symbol_examples() {
        let l = lat(8);
        let e1 = wave(&l, [1.0, 0.0, 0.0]);
        assert!(close(&apply_symbol(&e1, &SymbolSpec::identity()), &e1) < 1e-13);
        assert!(close(&apply_symbol(&e1, &SymbolSpec::minus_laplacian()), &e1) < 1e-13);
        let one = ComplexField::from_fn(&l, |_| [Complex64::new(1.0, 0.0)]);
        let z = apply_symbol(&one, &SymbolSpec::abs_pow(1.0));
        assert!(z.max_abs_diff(&ComplexField::zeros(&l)) < 1e-14);
    }

    #[test]
    fn lambda_examples() {
        let l = lat(8);
        let f = wave(&l, [2.0, 0.0, 0.0]);
        let up = lambda_eps(&f, 0.5, 1).unwrap();
        assert!(close(&up, &(&f * 2f64.sqrt())) < 1e-13);
        let down = lambda_eps(&f, 0.5, -1).unwrap();
        assert!(close(&down, &(&f * (1.0 / 2f64.sqrt()))) < 1e-13);
        let c = ComplexField::from_fn(&l, |_| [Complex64::new(0.3, -2.0)]);
        assert!(close(&lambda_eps(&c, 0.7, 1).unwrap(), &c) < 1e-13);
        assert!(close(&lambda_eps(&c, 0.7, -1).unwrap(), &c) < 1e-13);
        assert!(lambda_eps(&f, 0.0, 1).is_err());
        assert!(lambda_eps(&f, -1.0, -1).is_err());
    }

    #[test]
    fn h_eps_examples() {
        let l = lat(8);
        let f = wave(&l, [1.0, 0.0, 0.0]);
        assert!(close(&h_eps(&f, 0.0).unwrap(), &(&f * 0.5)) < 1e-13);
        assert!(close(&h_eps(&f, 1.0).unwrap(), &(&f * 0.414_213_562_373_095)) < 1e-13);
        let c = ComplexField::from_fn(&l, |_| [Complex64::new(1.0, 1.0)]);
        assert!(h_eps(&c, 0.3).unwrap().max_abs_diff(&ComplexField::zeros(&l)) < 1e-14);
    }

    #[test]
    fn leray_examples() {
        let l = lat(8);
        let u = VectorField::from_fn(&l, |x| [x[1].sin(), 0.0, 0.0]);
        assert!(leray_project(&u).max_abs_diff(&u) < 1e-13);
        let g = VectorField::from_fn(&l, |x| [x[0].cos(), 0.0, 0.0]);
        assert!(leray_project(&g).max_abs_diff(&VectorField::zeros(&l)) < 1e-13);
        let u = VectorField::from_fn(&l, |x| [x[0].cos(), x[0].cos(), 0.0]);
        let want = VectorField::from_fn(&l, |x| [0.0, x[0].cos(), 0.0]);
        assert!(leray_project(&u).max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn poisson_examples() {
        let l = lat(8);
        let rho = ScalarField::from_fn(&l, |x| [x[0].cos()]);
        let want = ScalarField::from_fn(&l, |x| [-x[0].cos()]);
        assert!(poisson_solve(&rho).max_abs_diff(&want) < 1e-13);
        let c = ScalarField::constant(&l, 3.5);
        assert!(poisson_solve(&c).max_abs_diff(&ScalarField::zeros(&l)) < 1e-13);
        let rho = ScalarField::from_fn(&l, |x| [x[0].cos() + (2.0 * x[1]).cos()]);
        let want = ScalarField::from_fn(&l, |x| [-x[0].cos() - 0.25 * (2.0 * x[1]).cos()]);
        assert!(poisson_solve(&rho).max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn littlewood_paley_examples() {
        let l = lat(16);
        let f = wave(&l, [1.0, 0.0, 0.0]);
        // β(1) = χ(1) − χ(2) = 1 for the fixed bump
        assert!(close(&littlewood_paley(&f, 1.0).unwrap(), &f) < 1e-13);
        let c = ComplexField::from_fn(&l, |_| [Complex64::new(1.0, 0.0)]);
        for mu in [0.5, 1.0, 2.0, 4.0] {
            let z = littlewood_paley(&c, mu).unwrap();
            assert!(z.max_abs_diff(&ComplexField::zeros(&l)) < 1e-14);
        }
        let g = wave(&l, [0.0, 3.0, 0.0]);
        let mut sum = ComplexField::zeros(&l);
        for mu in [1.0, 2.0, 4.0] {
            sum = &sum + &littlewood_paley(&g, mu).unwrap();
        }
        assert!(close(&sum, &g) < 1e-13);
        assert!(littlewood_paley(&g, 3.0).is_err());
        assert!(littlewood_paley(&g, 0.25).is_ok());
    }

    #[test]
    fn low_high_examples() {
        let l = lat(16);
        let f = wave(&l, [1.0, 0.0, 0.0]);
        let (lo, hi) = low_high_split(&f, 0.01).unwrap();
        assert!(close(&lo, &f) < 1e-13);
        assert!(hi.max_abs_diff(&ComplexField::zeros(&l)) < 1e-13);
        let f = wave(&l, [4.0, 0.0, 0.0]);
        let (lo, hi) = low_high_split(&f, 10.0).unwrap();
        assert!(lo.max_abs_diff(&ComplexField::zeros(&l)) < 1e-13);
        assert!(close(&hi, &f) < 1e-13);
        assert!(low_high_split(&f, 0.0).is_err());
    }

    #[test]
    fn derivative_operators() {
        let l = lat(8);
        let a0 = ScalarField::from_fn(&l, |x| [x[0].cos()]);
        let g = gradient(&a0);
        let want = VectorField::from_fn(&l, |x| [-x[0].sin(), 0.0, 0.0]);
        assert!(g.max_abs_diff(&want) < 1e-13);
        let a = VectorField::from_fn(&l, |x| [0.0, x[0].sin(), 0.0]);
        let b = curl(&a);
        let want = VectorField::from_fn(&l, |x| [0.0, 0.0, x[0].cos()]);
        assert!(b.max_abs_diff(&want) < 1e-13);
        assert!(divergence_defect(&b) < 1e-13);
        let u = VectorField::from_fn(&l, |x| [x[0].sin(), 0.0, 0.0]);
        let d = divergence(&u);
        assert!(d.max_abs_diff(&ScalarField::from_fn(&l, |x| [x[0].cos()])) < 1e-13);
        let f = wave(&l, [0.0, 2.0, 0.0]);
        let [_, dy, _] = spinor_gradient(&f);
        assert!(close(&dy, &f.scale(Complex64::new(0.0, 2.0))) < 1e-12);
        assert!(close(&partial(&f, 1), &dy) < 1e-13);
    }
}
