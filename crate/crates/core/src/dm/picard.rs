use num_complex::Complex64;

use super::fields::{electric_potential, projected_current};
use super::kernels::{free_dirac_mode, wave_step};
use super::step::step_count;
use super::{DmState, StepConfig};
use crate::error::{invalid, Result};
use crate::fourier::symbol::lambda_symbol;
use crate::fourier::{h1_norm, modewise, Lattice, Spectra, SpinorField, VectorField};
use crate::spinor::{alpha_dot_mul, dirac_symbol_mul};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Outcome of [`picard_solve`].
#[derive(Clone, Debug)]
pub struct PicardResult {
    /// Last iterate evaluated at the final time.
    pub final_state: DmState,
    /// `max_k ‖ψ^{(m+1)}(t_k) − ψ^{(m)}(t_k)‖_{H¹}` for `m = 0, 1, …`.
    pub differences: Vec<f64>,
    /// Ratios of consecutive differences (`NaN` where undefined).
    pub ratios: Vec<f64>,
    /// Set when the differences grew for three consecutive `m`.
    pub non_contracting: bool,
    pub dt: f64,
    pub steps: usize,
}

struct Iterate {
    psi: Vec<SpinorField>,
    a: Vec<VectorField>,
    eps_dt_a: Vec<VectorField>,
}

impl Iterate {
    fn zero(l: &Lattice, len: usize) -> Self {
        Self {
            psi: vec![SpinorField::zeros(l); len],
            a: vec![VectorField::zeros(l); len],
            eps_dt_a: vec![VectorField::zeros(l); len],
        }
    }
}

/// `φ₁(z) = (e^z − 1)/z` and `φ₂(z) = (e^z − 1 − z)/z²`.
fn phi12(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.1 {
        let (mut p1, mut p2) = (Complex64::default(), Complex64::default());
        let mut zk = Complex64::new(1.0, 0.0);
        let mut fact = 1.0; // k!
        for k in 0..12 {
            p1 += zk / (fact * (k + 1) as f64);
            p2 += zk / (fact * ((k + 1) * (k + 2)) as f64);
            zk *= z;
            fact *= (k + 1) as f64;
        }
        (p1, p2)
    } else {
        let ez = z.exp();
        ((ez - 1.0) / z, (ez - 1.0 - z) / (z * z))
    }
}

/// Source `F = −(A·α + A₀)ψ` of the linear Dirac problem, as spectra.
fn source_spectra(psi: &SpinorField, a: &VectorField, dealias: bool) -> Spectra<4> {
    let a0 = electric_potential(psi, dealias);
    let a0v = a0.comp(0);
    let f: SpinorField = psi.map_points(|i, v| {
        let av = alpha_dot_mul(a.at(i), v);
        std::array::from_fn(|c| -(av[c] + a0v[i] * v[c]))
    });
    f.spectra()
}

/// Picard iteration for the coupled system.
///
/// Iterate `−1` vanishes identically. Iterate `m+1` solves the linear Dirac
/// equation with source `−(A^{(m)}·α + A₀^{(m)})ψ^{(m)}` and the wave
/// equation with source `ε𝒫J(ψ^{(m)})`, both from the initial data. Iterate
/// 0 is therefore the free evolution.
///
/// On the time grid `t_k = k·h` the Dirac part uses the exponential
/// trapezoidal rule: with `z = ∓iλh/ε²` on the branch `Π±`,
/// `ψ_{k+1} = e^{−ihQ/ε²}ψ_k − ih Σ± Π±[(φ₁ − φ₂)(z) F_k + φ₂(z) F_{k+1}]`.
/// The wave part uses the exact oscillator with `J` frozen at the interval
/// mean.
pub fn picard_solve(
    init: &DmState,
    t_final: f64,
    m_max: usize,
    cfg: &StepConfig,
) -> Result<PicardResult> {
    cfg.validate()?;
    if cfg.dt < 0.0 {
        return Err(invalid("dt", "Picard iteration runs forward in time"));
    }
    let steps = step_count(t_final, cfg.dt)?;
    let h = t_final / steps as f64;
    let eps = init.eps;
    let l = init.lattice().clone();

    let mut prev = Iterate::zero(&l, steps + 1);
    let mut differences = Vec::new();
    for m in 0..=m_max {
        let mut next = Iterate {
            psi: Vec::with_capacity(steps + 1),
            a: Vec::with_capacity(steps + 1),
            eps_dt_a: Vec::with_capacity(steps + 1),
        };
        next.psi.push(init.psi.clone());
        next.a.push(init.a.clone());
        next.eps_dt_a.push(init.eps_dt_a.clone());

        let mut f_k = source_spectra(&prev.psi[0], &prev.a[0], cfg.dealias);
        let mut j_k = projected_current(&prev.psi[0], eps, cfg.dealias)?;
        for k in 0..steps {
            let f_k1 = source_spectra(&prev.psi[k + 1], &prev.a[k + 1], cfg.dealias);
            let j_k1 = projected_current(&prev.psi[k + 1], eps, cfg.dealias)?;

            let sp = next.psi[k].spectra();
            let joined: [Vec<Complex64>; 12] = std::array::from_fn(|c| match c / 4 {
                0 => sp[c].clone(),
                1 => f_k[c - 4].clone(),
                _ => f_k1[c - 8].clone(),
            });
            let out = modewise(&l, &joined, |_, xi, v: [Complex64; 12]| {
                let p = [v[0], v[1], v[2], v[3]];
                let f0 = [v[4], v[5], v[6], v[7]];
                let f1 = [v[8], v[9], v[10], v[11]];
                let lam = lambda_symbol(eps, xi);
                let mut r = free_dirac_mode(eps, xi, h, p);
                for sign in [1.0, -1.0] {
                    let z = Complex64::new(0.0, -sign * lam * h / (eps * eps));
                    let (p1, p2) = phi12(z);
                    let w: [Complex64; 4] = std::array::from_fn(|c| (p1 - p2) * f0[c] + p2 * f1[c]);
                    let qw = dirac_symbol_mul(eps, xi, w);
                    for c in 0..4 {
                        let proj = 0.5 * (w[c] + sign * qw[c] / lam);
                        r[c] -= I * h * proj;
                    }
                }
                r
            });
            next.psi.push(SpinorField::from_spectra(&l, out));

            let j_mid = &(&j_k + &j_k1) * 0.5;
            let (a1, e1) = wave_step(&next.a[k], &next.eps_dt_a[k], &j_mid, h, eps)?;
            next.a.push(a1);
            next.eps_dt_a.push(e1);
            f_k = f_k1;
            j_k = j_k1;
        }

        if m > 0 {
            let d = next
                .psi
                .iter()
                .zip(&prev.psi)
                .map(|(x, y)| h1_norm(&(x - y)))
                .fold(0.0, f64::max);
            differences.push(d);
        }
        prev = next;
    }

    let ratios: Vec<f64> = differences
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { f64::NAN })
        .collect();
    let non_contracting = differences.windows(4).any(|w| w[1] > w[0] && w[2] > w[1] && w[3] > w[2]);
    let final_state = DmState {
        t: init.t + t_final,
        eps,
        psi: prev.psi.pop().expect("at least one step"),
        a: prev.a.pop().expect("at least one step"),
        eps_dt_a: prev.eps_dt_a.pop().expect("at least one step"),
    };
    Ok(PicardResult {
        final_state,
        differences,
        ratios,
        non_contracting,
        dt: h,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_functions_are_continuous_across_the_switch() {
        for r in [0.0999, 0.1001] {
            for ang in [0.0, 1.0, 2.5] {
                let z = Complex64::from_polar(r, ang);
                let (a1, a2) = phi12(z);
                let ez = z.exp();
                let b1 = (ez - 1.0) / z;
                let b2 = (ez - 1.0 - z) / (z * z);
                assert!((a1 - b1).norm() < 1e-12);
                assert!((a2 - b2).norm() < 1e-10);
            }
        }
        let (p1, p2) = phi12(Complex64::default());
        assert_eq!(p1, Complex64::new(1.0, 0.0));
        assert_eq!(p2, Complex64::new(0.5, 0.0));
    }
}
