use num_complex::Complex64;
use serde::Serialize;

use crate::dm::step_count;
use crate::error::{Error, Result};
use crate::fourier::symbol::norm2;
use crate::fourier::{self, check_same, h1_norm, ScalarField, TwoSpinorField};
use crate::spinor::{total_charge, Branch};

/// Schrödinger–Poisson state `(t, v₊, v₋)`; `u` solves `Δu = |v₊|² + |v₋|²`.
#[derive(Clone, Debug)]
pub struct LimitState {
    pub t: f64,
    pub v_plus: TwoSpinorField,
    pub v_minus: TwoSpinorField,
}

impl LimitState {
    pub fn new(v_plus: TwoSpinorField, v_minus: TwoSpinorField) -> Result<Self> {
        check_same(v_plus.lattice(), v_minus.lattice())?;
        Ok(Self {
            t: 0.0,
            v_plus,
            v_minus,
        })
    }

    pub fn density(&self) -> ScalarField {
        ScalarField::from_index_fn(self.v_plus.lattice(), |i| {
            let a = self.v_plus.at(i);
            let b = self.v_minus.at(i);
            [a[0].norm_sqr() + a[1].norm_sqr() + b[0].norm_sqr() + b[1].norm_sqr()]
        })
    }

    pub fn potential(&self) -> ScalarField {
        fourier::poisson_solve(&self.density())
    }
}

/// `v ↦ e^{iτu} v` pointwise.
pub(crate) fn phase_kick(v: &TwoSpinorField, u: &ScalarField, tau: f64) -> TwoSpinorField {
    let uv = u.comp(0);
    v.map_points(|i, w| {
        let p = Complex64::from_polar(1.0, tau * uv[i]);
        w.map(|z| p * z)
    })
}

/// Exact free flow of `(i∂ₜ ± Δ/2)v = 0`: `v̂ ↦ e^{∓i|ξ|²τ/2} v̂`.
pub fn kinetic_step(v: &TwoSpinorField, tau: f64, branch: Branch) -> TwoSpinorField {
    let s = branch.sign();
    v.map_modes(|_, xi, w| {
        let p = Complex64::from_polar(1.0, -s * 0.5 * norm2(xi) * tau);
        w.map(|z| p * z)
    })
}

/// Strang step of the linear equation `(i∂ₜ ± Δ/2)v + uv = 0` with `u` frozen.
pub fn schrodinger_step(
    v: &TwoSpinorField,
    u: &ScalarField,
    dt: f64,
    branch: Branch,
) -> Result<TwoSpinorField> {
    check_same(v.lattice(), u.lattice())?;
    let w = phase_kick(v, u, 0.5 * dt);
    let w = kinetic_step(&w, dt, branch);
    Ok(phase_kick(&w, u, 0.5 * dt))
}

/// Strang step of the coupled system `(i∂ₜ ± Δ/2)v± + uv± = 0`, `Δu = n`.
/// The kicks preserve `n`, so the second kick uses `u` of the updated
/// density and the step is time reversible.
pub fn sp_step(s: &LimitState, dt: f64) -> Result<LimitState> {
    let u0 = s.potential();
    let p = phase_kick(&s.v_plus, &u0, 0.5 * dt);
    let m = phase_kick(&s.v_minus, &u0, 0.5 * dt);
    let p = kinetic_step(&p, dt, Branch::Plus);
    let m = kinetic_step(&m, dt, Branch::Minus);
    let mid = LimitState {
        t: s.t,
        v_plus: p,
        v_minus: m,
    };
    let u1 = mid.potential();
    let out = LimitState {
        t: s.t + dt,
        v_plus: phase_kick(&mid.v_plus, &u1, 0.5 * dt),
        v_minus: phase_kick(&mid.v_minus, &u1, 0.5 * dt),
    };
    if !out.v_plus.is_finite() || !out.v_minus.is_finite() {
        return Err(Error::NonFinite { step: 0 });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitDiagnostics {
    pub t: f64,
    pub mass_plus: f64,
    pub mass_minus: f64,
    pub h1_plus: f64,
    pub h1_minus: f64,
}

impl LimitDiagnostics {
    pub fn of(s: &LimitState) -> Self {
        Self {
            t: s.t,
            mass_plus: total_charge(&s.v_plus),
            mass_minus: total_charge(&s.v_minus),
            h1_plus: h1_norm(&s.v_plus),
            h1_minus: h1_norm(&s.v_minus),
        }
    }

    pub const CSV_HEADER: &'static str = "t,mass_plus,mass_minus,h1_plus,h1_minus";

    pub fn csv_line(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{:e}",
            self.t, self.mass_plus, self.mass_minus, self.h1_plus, self.h1_minus
        )
    }
}

#[derive(Clone, Debug)]
pub struct LimitTrajectory {
    pub dt: f64,
    pub steps: usize,
    pub diagnostics: Vec<LimitDiagnostics>,
    pub states: Vec<LimitState>,
}

/// Run [`sp_step`] to `t_final`, recording diagnostics every `sample_every`
/// steps; `observe` sees the initial state and every later one.
pub fn simulate_sp_with<F>(
    init: &LimitState,
    t_final: f64,
    dt: f64,
    sample_every: usize,
    h1_ceiling: f64,
    keep_states: bool,
    mut observe: F,
) -> Result<LimitTrajectory>
where
    F: FnMut(usize, &LimitState) -> Result<()>,
{
    let steps = step_count(t_final, dt)?;
    let dt = t_final / steps as f64;
    let every = sample_every.max(1);
    let mut traj = LimitTrajectory {
        dt,
        steps,
        diagnostics: Vec::new(),
        states: Vec::new(),
    };
    let record = |k: usize, s: &LimitState, traj: &mut LimitTrajectory| -> Result<()> {
        let d = LimitDiagnostics::of(s);
        let h1 = d.h1_plus.max(d.h1_minus);
        if !h1.is_finite() {
            return Err(Error::NonFinite { step: k });
        }
        if h1 > h1_ceiling {
            return Err(Error::BlowUp {
                step: k,
                norm: h1,
                ceiling: h1_ceiling,
            });
        }
        traj.diagnostics.push(d);
        if keep_states {
            traj.states.push(s.clone());
        }
        Ok(())
    };
    let mut s = init.clone();
    observe(0, &s)?;
    record(0, &s, &mut traj)?;
    for k in 1..=steps {
        s = sp_step(&s, dt).map_err(|e| match e {
            Error::NonFinite { .. } => Error::NonFinite { step: k },
            other => other,
        })?;
        s.t = init.t + k as f64 * dt;
        observe(k, &s)?;
        if k % every == 0 || k == steps {
            record(k, &s, &mut traj)?;
        }
    }
    Ok(traj)
}

pub fn simulate_sp(init: &LimitState, t_final: f64, dt: f64, keep_states: bool) -> Result<LimitTrajectory> {
    simulate_sp_with(init, t_final, dt, 1, 1e6, keep_states, |_, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Lattice;
    use std::f64::consts::PI;

    const Z: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn plane_wave_phases() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let dt = 0.3;
        let w = TwoSpinorField::from_fn(&l, |x| [Complex64::from_polar(1.0, x[0]), Z]);
        let s = LimitState::new(w.clone(), TwoSpinorField::zeros(&l)).unwrap();
        let out = sp_step(&s, dt).unwrap();
        assert!(out.v_plus.max_abs_diff(&w.scale(Complex64::from_polar(1.0, -dt / 2.0))) < 1e-13);
        let w = TwoSpinorField::from_fn(&l, |x| [Z, Complex64::from_polar(1.0, x[0])]);
        let s = LimitState::new(TwoSpinorField::zeros(&l), w.clone()).unwrap();
        let out = sp_step(&s, dt).unwrap();
        assert!(out.v_minus.max_abs_diff(&w.scale(Complex64::from_polar(1.0, dt / 2.0))) < 1e-13);
        let z = LimitState::new(TwoSpinorField::zeros(&l), TwoSpinorField::zeros(&l)).unwrap();
        let out = sp_step(&z, dt).unwrap();
        assert_eq!(out.v_plus.max_abs_diff(&z.v_plus), 0.0);
    }

    #[test]
    fn constant_data_is_stationary() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let c = TwoSpinorField::from_fn(&l, |_| [Complex64::new(0.4, 1.0), Complex64::new(-1.0, 0.0)]);
        let s = LimitState::new(c.clone(), TwoSpinorField::zeros(&l)).unwrap();
        let traj = simulate_sp(&s, 1.0, 0.1, true).unwrap();
        assert!(traj.states.last().unwrap().v_plus.max_abs_diff(&c) < 1e-13);
    }
}
