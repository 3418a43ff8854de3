//! Consistency of a sampled trajectory with the squared Dirac equation
//!
//! ```text
//! {ε²(i∂ₜ + A₀)² + (∇ − iεA)² − ε⁻² − iεE·α + εB·S}ψ = 0,
//! ```
//!
//! evaluated on `φ = e^{it/ε²}ψ`, where the ε⁻² terms cancel:
//!
//! ```text
//! −ε²φ_tt + 2i(1 + ε²A₀)φ_t + iε²(∂ₜA₀)φ + (2A₀ + ε²A₀²)φ
//!   + Δφ − 2iεA·∇φ − ε²|A|²φ − iεE·αφ + εB·Sφ.
//! ```
//!
//! Time derivatives are centered differences, so the residual of an exact
//! solution is `O(h²)` in the sample spacing `h`.

use num_complex::Complex64;

use crate::dm::{compute_eb, DmState};
use crate::error::{invalid, Result};
use crate::fourier::{self, l2_norm, symbol::norm2, SpinorField};
use crate::spinor::{alpha_dot_mul, spin_mul};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquaredResidual {
    pub t: f64,
    /// `L²` norm of the residual.
    pub residual: f64,
}

/// Residual at every interior sample of a uniformly spaced trajectory.
pub fn squared_dirac_check(states: &[DmState], dealias: bool) -> Result<Vec<SquaredResidual>> {
    if states.len() < 3 {
        return Err(invalid("states", "need at least three samples"));
    }
    let h = states[1].t - states[0].t;
    if !(h > 0.0) || states.windows(2).any(|w| ((w[1].t - w[0].t) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(invalid("states", "samples must be uniformly spaced in time"));
    }
    let eps = states[0].eps;
    if states.iter().any(|s| s.eps != eps) {
        return Err(invalid("states", "mixed eps values"));
    }
    let phi = |s: &DmState| s.psi.scale(Complex64::from_polar(1.0, s.t / (eps * eps)));
    let e2 = eps * eps;

    let mut out = Vec::with_capacity(states.len() - 2);
    for k in 1..states.len() - 1 {
        let s = &states[k];
        let (pm, p0, pp) = (phi(&states[k - 1]), phi(s), phi(&states[k + 1]));
        let a0 = s.a0(dealias);
        let a0_m = states[k - 1].a0(dealias);
        let a0_p = states[k + 1].a0(dealias);
        let (e, b) = compute_eb(&a0, &s.a, &s.eps_dt_a)?;
        let grad = fourier::spinor_gradient(&p0);
        let lap: SpinorField = p0.map_modes(|_, xi, v| v.map(|z| -norm2(xi) * z));

        let r: SpinorField = SpinorField::from_index_fn(s.lattice(), |i| {
            let (vm, v, vp) = (pm.at(i), p0.at(i), pp.at(i));
            let a00 = a0.comp(0)[i];
            let a0t = (a0_p.comp(0)[i] - a0_m.comp(0)[i]) / (2.0 * h);
            let av = s.a.at(i);
            let ea = alpha_dot_mul(e.at(i), v);
            let bi = b.at(i);
            let mut bs = [Complex64::default(); 4];
            for j in 0..3 {
                let sv = spin_mul(j, v);
                for c in 0..4 {
                    bs[c] += bi[j] * sv[c];
                }
            }
            let lv = lap.at(i);
            std::array::from_fn(|c| {
                let dt = (vp[c] - vm[c]) / (2.0 * h);
                let dtt = (vp[c] - 2.0 * v[c] + vm[c]) / (h * h);
                let adg = av[0] * grad[0].comp(c)[i] + av[1] * grad[1].comp(c)[i] + av[2] * grad[2].comp(c)[i];
                -e2 * dtt + 2.0 * I * (1.0 + e2 * a00) * dt + I * e2 * a0t * v[c]
                    + (2.0 * a00 + e2 * a00 * a00) * v[c]
                    + lv[c]
                    - 2.0 * I * eps * adg
                    - e2 * norm2(av) * v[c]
                    - I * eps * ea[c]
                    + eps * bs[c]
            })
        });
        out.push(SquaredResidual {
            t: s.t,
            residual: l2_norm(&r),
        });
    }
    Ok(out)
}
