use num_complex::Complex64;

use crate::error::Result;
use crate::fourier::symbol::{lambda_symbol, norm2};
use crate::fourier::{check_same, modewise, ScalarField, SpinorField, VectorField};
use crate::spinor::{alpha_dot_mul, check_eps, dirac_symbol_mul};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `e^{−iτQ̂/ε²} v` at one frequency, with `Q̂ = εα·ξ + γ⁰` and `Q̂² = λ²`.
#[inline]
pub(crate) fn free_dirac_mode(eps: f64, xi: [f64; 3], tau: f64, v: [Complex64; 4]) -> [Complex64; 4] {
    let lam = lambda_symbol(eps, xi);
    let (s, c) = (tau * lam / (eps * eps)).sin_cos();
    let q = dirac_symbol_mul(eps, xi, v);
    let k = -I * (s / lam);
    std::array::from_fn(|i| c * v[i] + k * q[i])
}

/// Exact free Dirac flow `i∂ₜψ = ε⁻²(−iεα·∇ + γ⁰)ψ` over time `dt`.
pub fn free_dirac_step(psi: &SpinorField, dt: f64, eps: f64) -> Result<SpinorField> {
    check_eps(eps)?;
    Ok(psi.map_modes(|_, xi, v| free_dirac_mode(eps, xi, dt, v)))
}

/// `exp(iτ(A₀ + A·α)) v`, using `(A·α)² = |A|²`.
#[inline]
pub(crate) fn kick_point(a0: f64, a: [f64; 3], tau: f64, v: [Complex64; 4]) -> [Complex64; 4] {
    let na = norm2(a).sqrt();
    let phase = Complex64::from_polar(1.0, tau * a0);
    if na == 0.0 {
        return v.map(|z| phase * z);
    }
    let (s, c) = (tau * na).sin_cos();
    let av = alpha_dot_mul(a, v);
    let k = I * (s / na);
    std::array::from_fn(|i| phase * (c * v[i] + k * av[i]))
}

/// Pointwise exact solution of `i∂ₜψ = −(A₀ + A_jα^j)ψ` with frozen potentials.
pub fn potential_kick(
    psi: &SpinorField,
    a0: &ScalarField,
    a: &VectorField,
    dt: f64,
) -> Result<SpinorField> {
    check_same(psi.lattice(), a0.lattice())?;
    check_same(psi.lattice(), a.lattice())?;
    let a0v = a0.comp(0);
    Ok(psi.map_points(|i, v| kick_point(a0v[i], a.at(i), dt, v)))
}

/// One mode of `ε²ä + κ²a = s` with `e = εȧ`, advanced exactly by `t`.
#[inline]
pub(crate) fn oscillator(
    kappa: f64,
    eps: f64,
    t: f64,
    a: Complex64,
    e: Complex64,
    s: Complex64,
) -> (Complex64, Complex64) {
    if kappa == 0.0 {
        let a1 = a + e * (t / eps) + s * (t * t / (2.0 * eps * eps));
        let e1 = e + s * (t / eps);
        return (a1, e1);
    }
    let (sn, cs) = (kappa * t / eps).sin_cos();
    let a1 = a * cs + e * (sn / kappa) + s * ((1.0 - cs) / (kappa * kappa));
    let e1 = -a * (kappa * sn) + e * cs + s * (sn / kappa);
    (a1, e1)
}

/// Exact per-mode solution of `ε²∂ₜ²A − ΔA = εJ` with `J` frozen over the
/// step. `J` is expected to be divergence free already.
pub fn wave_step(
    a: &VectorField,
    eps_dt_a: &VectorField,
    j: &VectorField,
    dt: f64,
    eps: f64,
) -> Result<(VectorField, VectorField)> {
    check_eps(eps)?;
    check_same(a.lattice(), eps_dt_a.lattice())?;
    check_same(a.lattice(), j.lattice())?;
    let l = a.lattice();
    let sa = a.spectra();
    let se = eps_dt_a.spectra();
    let sj = j.spectra();
    let joined: [Vec<Complex64>; 9] = std::array::from_fn(|c| match c / 3 {
        0 => sa[c % 3].clone(),
        1 => se[c % 3].clone(),
        _ => sj[c % 3].clone(),
    });
    let out = modewise(l, &joined, |_, xi, v: [Complex64; 9]| {
        let kappa = norm2(xi).sqrt();
        let mut r = [Complex64::default(); 6];
        for c in 0..3 {
            let (a1, e1) = oscillator(kappa, eps, dt, v[c], v[3 + c], eps * v[6 + c]);
            r[c] = a1;
            r[3 + c] = e1;
        }
        r
    });
    let [a0, a1, a2, e0, e1, e2] = out;
    Ok((
        VectorField::from_spectra(l, [a0, a1, a2]),
        VectorField::from_spectra(l, [e0, e1, e2]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Lattice;
    use crate::spinor::{pi_eps, total_charge, Branch};
    use std::f64::consts::PI;

    const Z: Complex64 = Complex64::new(0.0, 0.0);

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_mode_phases() {
        let l = Lattice::new(4, 2.0 * PI).unwrap();
        let (dt, eps) = (0.3, 0.5);
        let up = SpinorField::from_fn(&l, |_| [c(1.0), Z, Z, Z]);
        let out = free_dirac_step(&up, dt, eps).unwrap();
        let want = up.scale(Complex64::from_polar(1.0, -dt / (eps * eps)));
        assert!(out.max_abs_diff(&want) < 1e-14);
        let lo = SpinorField::from_fn(&l, |_| [Z, Z, c(1.0), Z]);
        let out = free_dirac_step(&lo, dt, eps).unwrap();
        let want = lo.scale(Complex64::from_polar(1.0, dt / (eps * eps)));
        assert!(out.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn eigen_plane_wave_phase() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let psi = SpinorField::from_fn(&l, |x| {
            let p = Complex64::from_polar(1.0, x[0]);
            [p, Z, Z, p * 0.4]
        });
        let psi = pi_eps(&psi, 1.0, Branch::Plus).unwrap();
        let dt = 0.37;
        let out = free_dirac_step(&psi, dt, 1.0).unwrap();
        let want = psi.scale(Complex64::from_polar(1.0, -dt * 2f64.sqrt()));
        assert!(out.max_abs_diff(&want) < 1e-13);
        assert!((total_charge(&out) - total_charge(&psi)).abs() < 1e-12 * total_charge(&psi));
    }

    #[test]
    fn kick_examples() {
        let l = Lattice::new(4, 2.0 * PI).unwrap();
        let psi = SpinorField::from_fn(&l, |x| [c(x[0]), Complex64::new(0.0, 1.0), Z, c(-1.0)]);
        let dt = 0.21;
        let a0 = ScalarField::constant(&l, 1.7);
        let zero = VectorField::zeros(&l);
        let out = potential_kick(&psi, &a0, &zero, dt).unwrap();
        assert!(out.max_abs_diff(&psi.scale(Complex64::from_polar(1.0, 1.7 * dt))) < 1e-14);
        let out = potential_kick(&psi, &ScalarField::zeros(&l), &zero, dt).unwrap();
        assert_eq!(out.max_abs_diff(&psi), 0.0);
        let s = 0.5f64.sqrt();
        let e3 = SpinorField::from_fn(&l, |_| [c(s), Z, c(s), Z]);
        let a = VectorField::constant(&l, [0.0, 0.0, 0.8]);
        let out = potential_kick(&e3, &ScalarField::zeros(&l), &a, dt).unwrap();
        assert!(out.max_abs_diff(&e3.scale(Complex64::from_polar(1.0, 0.8 * dt))) < 1e-14);
    }

    #[test]
    fn oscillator_examples() {
        let (kappa, eps, t) = (2.0, 0.5, 0.3);
        let (a, _) = oscillator(kappa, eps, t, c(1.0), Z, Z);
        assert!((a - c((kappa * t / eps).cos())).norm() < 1e-15);
        // zero mode: ȧ = v means e = εv
        let (a, _) = oscillator(0.0, eps, t, Z, c(eps * 1.5), Z);
        assert!((a - c(1.5 * t)).norm() < 1e-15);
        let jhat = c(0.7);
        let (a, _) = oscillator(kappa, eps, t, Z, Z, eps * jhat);
        let want = eps * jhat / (kappa * kappa) * (1.0 - (kappa * t / eps).cos());
        assert!((a - want).norm() < 1e-15);
        // energy of the homogeneous flow
        let (a0, e0) = (Complex64::new(0.3, -1.0), Complex64::new(2.0, 0.1));
        let (a1, e1) = oscillator(kappa, eps, t, a0, e0, Z);
        let en = |a: Complex64, e: Complex64| kappa * kappa * a.norm_sqr() + e.norm_sqr();
        assert!((en(a0, e0) - en(a1, e1)).abs() < 1e-13);
    }

    #[test]
    fn wave_step_matches_oscillator() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let a = VectorField::from_fn(&l, |x| [0.0, (2.0 * x[0]).cos(), 0.0]);
        let e = VectorField::zeros(&l);
        let j = VectorField::zeros(&l);
        let (eps, dt) = (0.5, 0.1);
        let (a1, _) = wave_step(&a, &e, &j, dt, eps).unwrap();
        let f = (2.0 * dt / eps).cos();
        let want = VectorField::from_fn(&l, |x| [0.0, f * (2.0 * x[0]).cos(), 0.0]);
        assert!(a1.max_abs_diff(&want) < 1e-13);
    }
}
