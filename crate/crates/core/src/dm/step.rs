use std::fmt::Write as _;

use serde::Serialize;

use super::fields::{electric_potential, projected_current};
use super::kernels::{free_dirac_step, potential_kick, wave_step};
use super::{DmState, StepConfig};
use crate::error::{invalid, Error, Result};
use crate::fourier::{self, h1_norm, l2_norm};
use crate::spinor::{pi_eps, total_charge, Branch};

/// Symmetric splitting step:
///
/// 1. half kick with `A₀(ψₙ)` and `Aₙ`,
/// 2. free Dirac flow over `dt/2`; the current `J` is taken here, at the
///    midpoint, Leray projected; free Dirac flow over another `dt/2`,
/// 3. exact wave step over `dt` with `J` frozen,
/// 4. half kick with `A₀` of the new charge density and `Aₙ₊₁`.
///
/// The kicks leave `ρ` unchanged, so stepping back with `−dt` retraces the
/// same potentials and the scheme is exactly time reversible.
pub fn dm_strang_step(s: &DmState, cfg: &StepConfig) -> Result<DmState> {
    cfg.validate()?;
    let (dt, eps) = (cfg.dt, s.eps);
    let half = 0.5 * dt;

    let a0 = electric_potential(&s.psi, cfg.dealias);
    let psi = potential_kick(&s.psi, &a0, &s.a, half)?;
    let psi = free_dirac_step(&psi, half, eps)?;
    let j = projected_current(&psi, eps, cfg.dealias)?;
    let psi = free_dirac_step(&psi, half, eps)?;
    let (a, eps_dt_a) = wave_step(&s.a, &s.eps_dt_a, &j, dt, eps)?;
    let a0 = electric_potential(&psi, cfg.dealias);
    let psi = potential_kick(&psi, &a0, &a, half)?;

    if !psi.is_finite() || !a.is_finite() || !eps_dt_a.is_finite() {
        return Err(Error::NonFinite { step: 0 });
    }
    Ok(DmState {
        t: s.t + dt,
        eps,
        psi,
        a,
        eps_dt_a,
    })
}

/// Number of steps of size close to `dt` that exactly cover `[0, t_final]`.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(invalid("t_final", format!("must be positive (got {t_final})")));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("must be positive (got {dt})")));
    }
    let r = t_final / dt;
    let n = if (r - r.round()).abs() < 1e-9 * r.max(1.0) {
        r.round()
    } else {
        r.ceil()
    };
    Ok((n as usize).max(1))
}

#[derive(Clone, Debug)]
pub struct SimOptions {
    /// Record diagnostics every this many steps (and at the final time).
    pub sample_every: usize,
    pub h1_ceiling: f64,
    /// Keep full states at the sample times.
    pub keep_states: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            sample_every: 1,
            h1_ceiling: 1e6,
            keep_states: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub charge: f64,
    pub h1_psi: f64,
    pub h1dot_a: f64,
    pub eps_l2_dt_a: f64,
    pub h1_pi_minus_psi: f64,
}

impl DiagnosticsRow {
    pub fn of(s: &DmState) -> Result<Self> {
        Ok(Self {
            t: s.t,
            charge: total_charge(&s.psi),
            h1_psi: h1_norm(&s.psi),
            h1dot_a: fourier::sobolev_norm(&s.a, 1.0, true)?,
            eps_l2_dt_a: l2_norm(&s.eps_dt_a),
            h1_pi_minus_psi: h1_norm(&pi_eps(&s.psi, s.eps, Branch::Minus)?),
        })
    }

    pub const CSV_HEADER: &'static str = "t,charge,h1_psi,h1dot_A,eps_l2_dtA,h1_pi_minus_psi";

    pub fn csv_line(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{:e},{:e}",
            self.t, self.charge, self.h1_psi, self.h1dot_a, self.eps_l2_dt_a, self.h1_pi_minus_psi
        )
    }
}

#[derive(Clone, Debug)]
pub struct DmTrajectory {
    /// Step actually used (`t_final / steps`).
    pub dt: f64,
    pub steps: usize,
    pub diagnostics: Vec<DiagnosticsRow>,
    /// States at the sample times when requested.
    pub states: Vec<DmState>,
}

impl DmTrajectory {
    pub fn final_state(&self) -> Option<&DmState> {
        self.states.last()
    }

    pub fn diagnostics_csv(&self) -> String {
        let mut out = String::from(DiagnosticsRow::CSV_HEADER);
        out.push('\n');
        for r in &self.diagnostics {
            let _ = writeln!(out, "{}", r.csv_line());
        }
        out
    }
}

/// Run the splitting scheme to `t_final`.
pub fn simulate_dm(
    init: &DmState,
    t_final: f64,
    cfg: &StepConfig,
    opts: &SimOptions,
) -> Result<DmTrajectory> {
    simulate_dm_with(init, t_final, cfg, opts, |_, _| Ok(()))
}

/// As [`simulate_dm`], calling `observe(step, state)` on the initial state
/// and after every step.
pub fn simulate_dm_with<F>(
    init: &DmState,
    t_final: f64,
    cfg: &StepConfig,
    opts: &SimOptions,
    mut observe: F,
) -> Result<DmTrajectory>
where
    F: FnMut(usize, &DmState) -> Result<()>,
{
    let steps = step_count(t_final, cfg.dt)?;
    let dt = t_final / steps as f64;
    let step_cfg = StepConfig { dt, ..cfg.clone() };
    step_cfg.validate()?;
    let every = opts.sample_every.max(1);

    let mut traj = DmTrajectory {
        dt,
        steps,
        diagnostics: Vec::new(),
        states: Vec::new(),
    };
    let record = |k: usize, s: &DmState, traj: &mut DmTrajectory| -> Result<()> {
        let row = DiagnosticsRow::of(s)?;
        if !row.h1_psi.is_finite() {
            return Err(Error::NonFinite { step: k });
        }
        if row.h1_psi > opts.h1_ceiling {
            return Err(Error::BlowUp {
                step: k,
                norm: row.h1_psi,
                ceiling: opts.h1_ceiling,
            });
        }
        traj.diagnostics.push(row);
        if opts.keep_states {
            traj.states.push(s.clone());
        }
        Ok(())
    };

    let mut s = init.clone();
    observe(0, &s)?;
    record(0, &s, &mut traj)?;
    for k in 1..=steps {
        s = dm_strang_step(&s, &step_cfg).map_err(|e| match e {
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
