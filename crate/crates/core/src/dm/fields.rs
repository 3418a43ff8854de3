use num_complex::Complex64;

use super::kernels::oscillator;
use super::DmState;
use crate::error::{Error, Result};
use crate::fourier::symbol::norm2;
use crate::fourier::{
    self, check_same, modewise, ScalarField, SpinorField, VectorField,
};
use crate::spinor::{
    alpha_dot_mul, charge_density, check_eps, current_density, dirac_symbol_mul, spin_mul,
};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `A₀` solving `ΔA₀ = ρ(ψ) − mean`, optionally from the 2/3-band part of `ρ`.
pub fn electric_potential(psi: &SpinorField, dealias: bool) -> ScalarField {
    let l = psi.lattice().clone();
    charge_density(psi).map_modes(|idx, xi, [v]| {
        let k2 = norm2(xi);
        if k2 == 0.0 || (dealias && !l.dealias_keeps(idx)) {
            [ZERO]
        } else {
            [-v / k2]
        }
    })
}

/// `𝒫J(ψ)`, optionally restricted to the 2/3 band.
pub fn projected_current(psi: &SpinorField, eps: f64, dealias: bool) -> Result<VectorField> {
    let l = psi.lattice().clone();
    Ok(current_density(psi, eps)?.map_modes(|idx, xi, v| {
        if dealias && !l.dealias_keeps(idx) {
            return [ZERO; 3];
        }
        let k2 = norm2(xi);
        if k2 == 0.0 {
            return v;
        }
        let dot = (xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2]) / k2;
        std::array::from_fn(|j| v[j] - xi[j] * dot)
    }))
}

/// `E = ∇A₀ − ε∂ₜA`, `B = ∇×A`.
pub fn compute_eb(
    a0: &ScalarField,
    a: &VectorField,
    eps_dt_a: &VectorField,
) -> Result<(VectorField, VectorField)> {
    check_same(a0.lattice(), a.lattice())?;
    check_same(a0.lattice(), eps_dt_a.lattice())?;
    let e = &fourier::gradient(a0) - eps_dt_a;
    Ok((e, fourier::curl(a)))
}

/// `∂ₜψ` from the Dirac equation at the given state.
pub fn dirac_time_derivative(s: &DmState, dealias: bool) -> SpinorField {
    let eps = s.eps;
    let inv = 1.0 / (eps * eps);
    let free = s
        .psi
        .map_modes(|_, xi, v| dirac_symbol_mul(eps, xi, v).map(|z| -I * inv * z));
    let a0 = s.a0(dealias);
    let a0v = a0.comp(0);
    free.map_points(|i, f| {
        let v = s.psi.at(i);
        let av = alpha_dot_mul(s.a.at(i), v);
        std::array::from_fn(|c| f[c] + I * (av[c] + a0v[i] * v[c]))
    })
}

/// The remainder `R^ε` of the modulated equations:
/// `λR = ε{2iA·∇ + iE_jα^j − B_jS^j}ψ + ε²|A|²ψ − [A₀, λ](ψ₊ − ψ₋)`.
pub fn remainder_r(
    s: &DmState,
    psi_plus: &SpinorField,
    psi_minus: &SpinorField,
    dealias: bool,
) -> Result<SpinorField> {
    let eps = s.eps;
    check_eps(eps)?;
    check_same(s.lattice(), psi_plus.lattice())?;
    check_same(s.lattice(), psi_minus.lattice())?;
    let a0 = s.a0(dealias);
    let (e, b) = compute_eb(&a0, &s.a, &s.eps_dt_a)?;
    let grad = fourier::spinor_gradient(&s.psi);
    let diff = psi_plus - psi_minus;
    let a0v = a0.comp(0);
    let a0_diff = diff.map_points(|i, v| v.map(|z| a0v[i] * z));
    let lam_diff = fourier::lambda_eps(&diff, eps, 1)?;
    let lam_a0_diff = fourier::lambda_eps(&a0_diff, eps, 1)?;

    let body: SpinorField = s.psi.map_points(|i, v| {
        let a = s.a.at(i);
        let ei = e.at(i);
        let bi = b.at(i);
        let ea = alpha_dot_mul(ei, v);
        let mut bs = [ZERO; 4];
        for j in 0..3 {
            let sv = spin_mul(j, v);
            for c in 0..4 {
                bs[c] += bi[j] * sv[c];
            }
        }
        let a2 = norm2(a);
        let ld = lam_diff.at(i);
        let lad = lam_a0_diff.at(i);
        std::array::from_fn(|c| {
            let adg = a[0] * grad[0].comp(c)[i] + a[1] * grad[1].comp(c)[i] + a[2] * grad[2].comp(c)[i];
            let commutator = a0v[i] * ld[c] - lad[c];
            eps * (2.0 * I * adg + I * ea[c] - bs[c]) + eps * eps * a2 * v[c] - commutator
        })
    });
    fourier::lambda_eps(&body, eps, -1)
}

/// The auxiliary spinor `U` sampled on a uniform time grid, with `ε∂ₜU`.
#[derive(Clone, Debug)]
pub struct UTrajectory {
    pub dt: f64,
    pub u: Vec<SpinorField>,
    pub eps_dt_u: Vec<SpinorField>,
}

/// Solve `□_ε U = −i(ε∂ₜ + α^j∂_j)ψ`, `U(0) = 0`, `iε∂ₜU(0) = ψ(0)` with the
/// exact per-mode oscillator and the source frozen on each interval at the
/// mean of its endpoint values.
///
/// `psi[k]` and `eps_dt_psi[k]` are `ψ` and `ε∂ₜψ` at `t = k·dt`.
pub fn build_u(
    psi: &[SpinorField],
    eps_dt_psi: &[SpinorField],
    dt: f64,
    eps: f64,
) -> Result<UTrajectory> {
    check_eps(eps)?;
    if psi.len() < 2 || psi.len() != eps_dt_psi.len() {
        return Err(Error::InsufficientSampling(format!(
            "need at least two samples of psi and eps*dt(psi) (got {} and {})",
            psi.len(),
            eps_dt_psi.len()
        )));
    }
    let l = psi[0].lattice().clone();
    let sources: Vec<[Vec<Complex64>; 4]> = psi
        .iter()
        .zip(eps_dt_psi)
        .map(|(p, d)| {
            let sp = p.spectra();
            let sd = d.spectra();
            let joined: [Vec<Complex64>; 8] =
                std::array::from_fn(|c| if c < 4 { sp[c].clone() } else { sd[c - 4].clone() });
            modewise(&l, &joined, |_, xi, v: [Complex64; 8]| {
                let pv = [v[0], v[1], v[2], v[3]];
                let ag = alpha_dot_mul(xi, pv);
                // −i(ε∂ₜψ + α·∇ψ), with α·∇ ↦ iα·ξ
                std::array::from_fn(|c| -I * (v[4 + c] + I * ag[c]))
            })
        })
        .collect();

    let size = |s: &[Vec<Complex64>; 4]| -> f64 {
        s.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum::<f64>().sqrt()
    };
    let scale = sources.iter().map(size).fold(0.0, f64::max);
    if scale > 0.0 {
        for k in 0..sources.len() - 1 {
            let d: [Vec<Complex64>; 4] = std::array::from_fn(|c| {
                sources[k + 1][c].iter().zip(&sources[k][c]).map(|(a, b)| a - b).collect()
            });
            let jump = size(&d) / scale;
            if jump > 0.5 {
                return Err(Error::InsufficientSampling(format!(
                    "source changes by {jump:.3} of its size between samples {k} and {}",
                    k + 1
                )));
            }
        }
    }

    let mut u: [Vec<Complex64>; 4] = std::array::from_fn(|_| vec![ZERO; l.len()]);
    let mut e: [Vec<Complex64>; 4] = psi[0].spectra().map(|c| c.into_iter().map(|z| -I * z).collect());
    let kappa: Vec<f64> = (0..l.len()).map(|i| norm2(l.wavevector(i)).sqrt()).collect();

    let mut out_u = vec![SpinorField::from_spectra(&l, u.clone())];
    let mut out_e = vec![SpinorField::from_spectra(&l, e.clone())];
    for k in 0..sources.len() - 1 {
        for c in 0..4 {
            for i in 0..l.len() {
                let s = 0.5 * (sources[k][c][i] + sources[k + 1][c][i]);
                let (a1, e1) = oscillator(kappa[i], eps, dt, u[c][i], e[c][i], s);
                u[c][i] = a1;
                e[c][i] = e1;
            }
        }
        out_u.push(SpinorField::from_spectra(&l, u.clone()));
        out_e.push(SpinorField::from_spectra(&l, e.clone()));
    }
    Ok(UTrajectory {
        dt,
        u: out_u,
        eps_dt_u: out_e,
    })
}

/// [`build_u`] with `ε∂ₜψ` from second-order finite differences of the
/// samples (centered inside, one-sided at the ends).
pub fn build_u_from_trajectory(psi: &[SpinorField], dt: f64, eps: f64) -> Result<UTrajectory> {
    if psi.len() < 3 {
        return Err(Error::InsufficientSampling(format!(
            "need at least three samples for finite differences (got {})",
            psi.len()
        )));
    }
    let n = psi.len();
    let k = eps / dt;
    let d: Vec<SpinorField> = (0..n)
        .map(|i| {
            let (a, b, c, w) = if i == 0 {
                (&psi[0], &psi[1], &psi[2], [-1.5, 2.0, -0.5])
            } else if i == n - 1 {
                (&psi[n - 3], &psi[n - 2], &psi[n - 1], [0.5, -2.0, 1.5])
            } else {
                (&psi[i - 1], &psi[i], &psi[i + 1], [-0.5, 0.0, 0.5])
            };
            a.map_points(|j, va| {
                let vb = b.at(j);
                let vc = c.at(j);
                std::array::from_fn(|q| k * (w[0] * va[q] + w[1] * vb[q] + w[2] * vc[q]))
            })
        })
        .collect();
    build_u(psi, &d, dt, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Lattice;
    use std::f64::consts::PI;

    #[test]
    fn eb_examples() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let a0 = ScalarField::from_fn(&l, |x| [x[0].cos()]);
        let z = VectorField::zeros(&l);
        let (e, b) = compute_eb(&a0, &z, &z).unwrap();
        assert!(e.max_abs_diff(&VectorField::from_fn(&l, |x| [-x[0].sin(), 0.0, 0.0])) < 1e-13);
        assert!(b.max_abs_diff(&z) < 1e-13);
        let a = VectorField::from_fn(&l, |x| [0.0, x[0].sin(), 0.0]);
        let (_, b) = compute_eb(&ScalarField::zeros(&l), &a, &z).unwrap();
        assert!(b.max_abs_diff(&VectorField::from_fn(&l, |x| [0.0, 0.0, x[0].cos()])) < 1e-13);
        assert!(fourier::divergence_defect(&b) < 1e-12);
        let c = VectorField::constant(&l, [0.0, 0.6, 0.0]);
        let (e, _) = compute_eb(&ScalarField::zeros(&l), &z, &c).unwrap();
        assert!(e.max_abs_diff(&VectorField::constant(&l, [0.0, -0.6, 0.0])) < 1e-13);
    }

    #[test]
    fn u_of_constant_spinor() {
        let l = Lattice::new(4, 2.0 * PI).unwrap();
        let cst = [Complex64::new(1.0, 0.5), ZERO, Complex64::new(0.0, -2.0), ZERO];
        let psi: Vec<SpinorField> = (0..11).map(|_| SpinorField::from_fn(&l, |_| cst)).collect();
        let d: Vec<SpinorField> = (0..11).map(|_| SpinorField::zeros(&l)).collect();
        let (dt, eps) = (0.05, 0.5);
        let u = build_u(&psi, &d, dt, eps).unwrap();
        for (k, uk) in u.u.iter().enumerate() {
            let t = k as f64 * dt;
            let want = SpinorField::from_fn(&l, |_| cst.map(|z| -I * t * z / eps));
            assert!(uk.max_abs_diff(&want) < 1e-13, "k = {k}");
        }
        let zero: Vec<SpinorField> = (0..3).map(|_| SpinorField::zeros(&l)).collect();
        let u = build_u(&zero, &zero, dt, eps).unwrap();
        assert!(u.u.iter().all(|x| x.max_abs_diff(&SpinorField::zeros(&l)) == 0.0));
    }
}
