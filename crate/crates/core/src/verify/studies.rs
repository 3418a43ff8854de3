//! Convergence studies: the coupled solver run side by side with a limit
//! solver, errors taken as suprema over the sampled times.

use num_complex::Complex64;

use super::config::ExperimentConfig;
use super::pairing::PairingAccumulator;
use super::rates::RateReport;
use crate::dm::{
    dirac_time_derivative, simulate_dm_with, step_count, DiagnosticsRow, DmState, SimOptions,
    StepConfig,
};
use crate::error::{invalid, Result};
use crate::fourier::{self, h1_norm, l2_norm, lp_norm, sobolev_norm, Lattice, SpinorField, TwoSpinorField};
use crate::limit::{pauli_diagnostics, pauli_step, sp_step, LimitDiagnostics, LimitState, PauliState};
use crate::par;
use crate::spinor::{
    charge_density, current_density, limit_current, lower, pauli_current, pi_eps, sigma_dot_mul,
    spin_density, upper, Branch,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Report plus the per-ε diagnostics of the coupled runs.
#[derive(Clone, Debug)]
pub struct StudyOutput {
    pub report: RateReport,
    pub diagnostics: Vec<Vec<DiagnosticsRow>>,
}

impl StudyOutput {
    /// Diagnostics of all runs in one table with a leading `eps` column.
    pub fn diagnostics_csv(&self) -> String {
        let mut out = format!("eps,{}\n", DiagnosticsRow::CSV_HEADER);
        for (eps, rows) in self.report.eps.iter().zip(&self.diagnostics) {
            for r in rows {
                out.push_str(&format!("{eps:e},{}\n", r.csv_line()));
            }
        }
        out
    }
}

fn run_options(cfg: &ExperimentConfig) -> SimOptions {
    SimOptions {
        sample_every: cfg.sample_every,
        h1_ceiling: 1e6,
        keep_states: false,
    }
}

fn check_study(cfg: &ExperimentConfig) -> Result<Lattice> {
    cfg.validate()?;
    if cfg.eps.len() < 3 {
        return Err(invalid(
            "eps",
            format!("a study needs at least 3 eps values (got {})", cfg.eps.len()),
        ));
    }
    cfg.lattice()
}

/// `e^{−it/ε²}(v₊, 0) + e^{it/ε²}(0, v₋)`.
fn limit_spinor(lim: &LimitState, eps: f64) -> SpinorField {
    let p = Complex64::from_polar(1.0, -lim.t / (eps * eps));
    let m = p.conj();
    SpinorField::from_index_fn(lim.v_plus.lattice(), |i| {
        let a = lim.v_plus.at(i);
        let b = lim.v_minus.at(i);
        [p * a[0], p * a[1], m * b[0], m * b[1]]
    })
}

struct NonrelCell {
    dt: f64,
    steps: usize,
    errors: [f64; 5],
    pairing: Option<f64>,
    current_t0: f64,
    diagnostics: Vec<DiagnosticsRow>,
}

const NONREL_NORMS: [&str; 5] = ["h1_spinor", "hdot1_a0", "l1_rho", "l2_rho", "l3_rho"];

fn nonrel_cell(cfg: &ExperimentConfig, l: &Lattice, eps: f64) -> Result<NonrelCell> {
    let init = cfg.data.initial_state(l, eps)?;
    let (vp, vm) = cfg.data.limit_data(l)?;
    let mut lim = LimitState::new(vp, vm)?;
    let step = StepConfig::new(cfg.dt.at(eps)).with_dealias(cfg.dealias);
    let steps = step_count(cfg.t_final, step.dt)?;
    let every = cfg.sample_every;
    let mut pair = cfg
        .bump
        .as_ref()
        .map(|b| (PairingAccumulator::new(b, l), PairingAccumulator::new(b, l)));
    let mut errors = [0.0_f64; 5];
    let mut current_t0 = 0.0;

    let traj = simulate_dm_with(&init, cfg.t_final, &step, &run_options(cfg), |k, s| {
        if k > 0 {
            lim = sp_step(&lim, s.t - lim.t)?;
        }
        let sampled = k % every == 0 || k == steps;
        let needs_current = k == 0 || pair.is_some();
        let (j, j0) = if needs_current {
            (
                Some(current_density(&s.psi, eps)?),
                Some(limit_current(&lim.v_plus, &lim.v_minus)?),
            )
        } else {
            (None, None)
        };
        if let (Some((pd, pl)), Some(j), Some(j0)) = (pair.as_mut(), &j, &j0) {
            pd.push(s.t, j);
            pl.push(s.t, j0);
        }
        if k == 0 {
            if let (Some(j), Some(j0)) = (&j, &j0) {
                current_t0 = lp_norm(&(j - j0), 1.0)?;
            }
        }
        if sampled {
            let rho = &charge_density(&s.psi) - &lim.density();
            let e = [
                h1_norm(&(&s.psi - &limit_spinor(&lim, eps))),
                sobolev_norm(&(&s.a0(cfg.dealias) - &lim.potential()), 1.0, true)?,
                lp_norm(&rho, 1.0)?,
                lp_norm(&rho, 2.0)?,
                lp_norm(&rho, 3.0)?,
            ];
            for (m, v) in errors.iter_mut().zip(e) {
                *m = m.max(v);
            }
        }
        Ok(())
    })?;

    let pairing = match pair {
        Some((pd, pl)) => {
            let (a, b) = (pd.finish()?, pl.finish()?);
            Some((0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt())
        }
        None => None,
    };
    Ok(NonrelCell {
        dt: traj.dt,
        steps: traj.steps,
        errors,
        pairing,
        current_t0,
        diagnostics: traj.diagnostics,
    })
}

/// Coupled runs against the Schrödinger–Poisson limit for every ε.
///
/// Fitted norms: `h1_spinor` (sup of `‖ψ^ε − ψ_lim‖_{H¹}`), `hdot1_a0`,
/// `l1_rho`, `l2_rho`, `l3_rho`, and `current_pairing` when a bump is
/// configured. `l1_current_t0` is recorded unfitted.
pub fn nonrel_convergence_study(cfg: &ExperimentConfig) -> Result<StudyOutput> {
    let l = check_study(cfg)?;
    let cells = par::map_jobs(&cfg.eps, |&eps| nonrel_cell(cfg, &l, eps));
    let cells: Vec<NonrelCell> = cells.into_iter().collect::<Result<_>>()?;
    let mut report = RateReport::new("nonrelativistic", cfg.eps.clone());
    report.dt = cells.iter().map(|c| c.dt).collect();
    report.steps = cells.iter().map(|c| c.steps).collect();
    for (i, name) in NONREL_NORMS.iter().enumerate() {
        report.add(name, cells.iter().map(|c| c.errors[i]).collect())?;
    }
    if cfg.bump.is_some() {
        report.add("current_pairing", cells.iter().map(|c| c.pairing.unwrap_or(f64::NAN)).collect())?;
    }
    report
        .extra
        .insert("l1_current_t0".into(), cells.iter().map(|c| c.current_t0).collect());
    Ok(StudyOutput {
        report,
        diagnostics: cells.into_iter().map(|c| c.diagnostics).collect(),
    })
}

struct PauliCell {
    dt: f64,
    steps: usize,
    h1_chi: f64,
    current: f64,
    pi_minus: f64,
    diagnostics: Vec<DiagnosticsRow>,
    pauli_diagnostics: Vec<LimitDiagnostics>,
    pauli: PauliState,
}

fn seminonrel_cell(cfg: &ExperimentConfig, l: &Lattice, eps: f64) -> Result<PauliCell> {
    let init = cfg.data.initial_state(l, eps)?;
    let mut pauli = PauliState::new(upper(&init.psi), eps)?;
    let step = StepConfig::new(cfg.dt.at(eps)).with_dealias(cfg.dealias);
    let steps = step_count(cfg.t_final, step.dt)?;
    let every = cfg.sample_every;
    let gauge = |s: &DmState| (s.a0(cfg.dealias), s.a.clone(), fourier::curl(&s.a));
    let mut prev = gauge(&init);
    let (mut h1_chi, mut current) = (0.0_f64, 0.0_f64);
    let mut pauli_diag = Vec::new();

    let traj = simulate_dm_with(&init, cfg.t_final, &step, &run_options(cfg), |k, s| {
        if k > 0 {
            // gauge frozen at the average of the step's endpoints
            let g = gauge(s);
            let a0 = &(&prev.0 + &g.0) * 0.5;
            let a = &(&prev.1 + &g.1) * 0.5;
            let b = &(&prev.2 + &g.2) * 0.5;
            pauli = pauli_step(&pauli, &a0, &a, Some(&b), s.t - pauli.t)?;
            prev = g;
        }
        if k % every == 0 || k == steps {
            pauli_diag.push(pauli_diagnostics(&pauli));
            let chi = upper(&s.psi).scale(Complex64::from_polar(1.0, s.t / (eps * eps)));
            h1_chi = h1_chi.max(h1_norm(&(&chi - &pauli.chi)));
            let j = current_density(&s.psi, eps)?;
            let jp = pauli_current(&pauli.chi, &s.a, eps)?;
            let spin = &fourier::curl(&spin_density(&pauli.chi)) * 0.5;
            current = current.max(lp_norm(&(&(&j - &jp) - &spin), 1.0)?);
        }
        Ok(())
    })?;
    let pi_minus = traj.diagnostics.iter().map(|r| r.h1_pi_minus_psi).fold(0.0, f64::max);
    Ok(PauliCell {
        dt: traj.dt,
        steps: traj.steps,
        h1_chi,
        current,
        pi_minus,
        diagnostics: traj.diagnostics,
        pauli_diagnostics: pauli_diag,
        pauli,
    })
}

/// Pauli spinor evolved alongside one coupled run, in that run's potentials.
#[derive(Clone, Debug)]
pub struct DrivenPauli {
    pub dirac: Vec<DiagnosticsRow>,
    pub pauli: Vec<LimitDiagnostics>,
    pub final_state: PauliState,
}

/// The Pauli half of a semi-nonrelativistic cell at a single ε, with
/// `χ_P(0)` the upper components of `ψ^ε(0)`.
pub fn driven_pauli_run(cfg: &ExperimentConfig, eps: f64) -> Result<DrivenPauli> {
    cfg.validate()?;
    let c = seminonrel_cell(cfg, &cfg.lattice()?, eps)?;
    Ok(DrivenPauli {
        dirac: c.diagnostics,
        pauli: c.pauli_diagnostics,
        final_state: c.pauli,
    })
}

/// Coupled runs against the Pauli equation driven by the coupled run's own
/// potentials. Fitted norms: `h1_chi` and `l1_current_defect`, the latter
/// being `‖J^ε − J_P − ½∇×⟨σχ,χ⟩‖_{L¹}`. `h1_pi_minus` is recorded unfitted.
pub fn seminonrel_study(cfg: &ExperimentConfig) -> Result<StudyOutput> {
    let l = check_study(cfg)?;
    let cells = par::map_jobs(&cfg.eps, |&eps| seminonrel_cell(cfg, &l, eps));
    let cells: Vec<PauliCell> = cells.into_iter().collect::<Result<_>>()?;
    let mut report = RateReport::new("seminonrelativistic", cfg.eps.clone());
    report.dt = cells.iter().map(|c| c.dt).collect();
    report.steps = cells.iter().map(|c| c.steps).collect();
    report.add("h1_chi", cells.iter().map(|c| c.h1_chi).collect())?;
    report.add("l1_current_defect", cells.iter().map(|c| c.current).collect())?;
    report
        .extra
        .insert("h1_pi_minus".into(), cells.iter().map(|c| c.pi_minus).collect());
    Ok(StudyOutput {
        report,
        diagnostics: cells.into_iter().map(|c| c.diagnostics).collect(),
    })
}

/// Small-component sizes at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallSample {
    pub t: f64,
    /// `‖Π₋^εψ‖_{H¹}`.
    pub pi_minus_h1: f64,
    /// `‖η‖_{H¹}`, `η` the lower component of `e^{it/ε²}ψ`.
    pub eta_h1: f64,
    /// `‖∂ₜη‖_{L²}` with `∂ₜψ` taken from the equation itself.
    pub dt_eta_l2: f64,
}

pub fn small_component_sample(s: &DmState, dealias: bool) -> Result<SmallSample> {
    let eps = s.eps;
    let ph = Complex64::from_polar(1.0, s.t / (eps * eps));
    let phi = s.psi.scale(ph);
    // ∂ₜ(e^{it/ε²}ψ) = e^{it/ε²}(∂ₜψ + iψ/ε²)
    let dphi = dirac_time_derivative(s, dealias)
        .axpy(I / (eps * eps), &s.psi)?
        .scale(ph);
    Ok(SmallSample {
        t: s.t,
        pi_minus_h1: h1_norm(&pi_eps(&s.psi, eps, Branch::Minus)?),
        eta_h1: h1_norm(&lower(&phi)),
        dt_eta_l2: l2_norm(&lower(&dphi)),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallComponentTrack {
    pub eps: f64,
    pub order: u32,
    pub samples: Vec<SmallSample>,
    /// `sup_t` of `pi_minus_h1`, `eta_h1`, `dt_eta_l2`.
    pub sup: [f64; 3],
}

impl SmallComponentTrack {
    /// `sup_t ‖Π₋^εψ‖_{H¹} / ε^order`.
    pub fn constant(&self) -> f64 {
        self.sup[0] / self.eps.powi(self.order as i32)
    }
}

fn check_order(order: u32) -> Result<()> {
    if order == 1 || order == 2 {
        Ok(())
    } else {
        Err(invalid("order", format!("must be 1 or 2 (got {order})")))
    }
}

pub fn small_component_track(states: &[DmState], order: u32, dealias: bool) -> Result<SmallComponentTrack> {
    check_order(order)?;
    let Some(first) = states.first() else {
        return Err(invalid("states", "empty trajectory"));
    };
    let samples = states
        .iter()
        .map(|s| small_component_sample(s, dealias))
        .collect::<Result<Vec<_>>>()?;
    let mut sup = [0.0_f64; 3];
    for s in &samples {
        for (m, v) in sup.iter_mut().zip([s.pi_minus_h1, s.eta_h1, s.dt_eta_l2]) {
            *m = m.max(v);
        }
    }
    Ok(SmallComponentTrack {
        eps: first.eps,
        order,
        samples,
        sup,
    })
}

/// Growth allowed for the measured constant `C(ε) = sup/ε^order` relative
/// to its value at the largest ε.
pub const SMALL_COMPONENT_SLACK: f64 = 1.5;

#[derive(Clone, Debug, PartialEq)]
pub struct SmallComponentVerdict {
    pub eps: Vec<f64>,
    pub constants: Vec<f64>,
    pub passes: bool,
}

/// `sup_t ‖Π₋^εψ‖ ≤ C·ε^order` with `C` measured at the largest ε; the
/// verdict passes when no smaller ε needs more than
/// [`SMALL_COMPONENT_SLACK`] times that constant.
pub fn small_component_verdict(tracks: &[SmallComponentTrack]) -> Result<SmallComponentVerdict> {
    if tracks.len() < 2 {
        return Err(invalid("tracks", "a verdict needs at least two eps values"));
    }
    if tracks.windows(2).any(|w| w[0].order != w[1].order) {
        return Err(invalid("tracks", "mixed orders"));
    }
    let mut sorted: Vec<&SmallComponentTrack> = tracks.iter().collect();
    sorted.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let constants: Vec<f64> = sorted.iter().map(|t| t.constant()).collect();
    let c0 = constants[0];
    let passes = constants.iter().all(|c| c.is_finite() && *c <= SMALL_COMPONENT_SLACK * c0);
    Ok(SmallComponentVerdict {
        eps: sorted.iter().map(|t| t.eps).collect(),
        constants,
        passes,
    })
}

/// Track the small components of the coupled run for every ε.
pub fn small_component_study(
    cfg: &ExperimentConfig,
    order: u32,
) -> Result<(Vec<SmallComponentTrack>, SmallComponentVerdict)> {
    check_order(order)?;
    cfg.validate()?;
    let l = cfg.lattice()?;
    let tracks = par::map_jobs(&cfg.eps, |&eps| -> Result<SmallComponentTrack> {
        let init = cfg.data.initial_state(&l, eps)?;
        let step = StepConfig::new(cfg.dt.at(eps)).with_dealias(cfg.dealias);
        let steps = step_count(cfg.t_final, step.dt)?;
        let mut samples = Vec::new();
        simulate_dm_with(&init, cfg.t_final, &step, &run_options(cfg), |k, s| {
            if k % cfg.sample_every == 0 || k == steps {
                samples.push(small_component_sample(s, cfg.dealias)?);
            }
            Ok(())
        })?;
        let mut sup = [0.0_f64; 3];
        for s in &samples {
            for (m, v) in sup.iter_mut().zip([s.pi_minus_h1, s.eta_h1, s.dt_eta_l2]) {
                *m = m.max(v);
            }
        }
        Ok(SmallComponentTrack {
            eps,
            order,
            samples,
            sup,
        })
    });
    let tracks: Vec<SmallComponentTrack> = tracks.into_iter().collect::<Result<_>>()?;
    let verdict = small_component_verdict(&tracks)?;
    Ok((tracks, verdict))
}

/// Residuals of the lower-component expansion at one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NaiveResidual {
    pub t: f64,
    /// `‖η + ½iεσ·∇χ‖_{L²}`.
    pub leading: f64,
    /// `‖η + ½iεσ·∇χ + ½ε²(i∂ₜη + A₀η + A·σχ)‖_{L²}` with a centered
    /// difference for `∂ₜη`; interior samples only.
    pub full: Option<f64>,
}

fn demodulated(s: &DmState) -> SpinorField {
    s.psi.scale(Complex64::from_polar(1.0, s.t / (s.eps * s.eps)))
}

/// `η + ½iεσ·∇χ` for `(χ, η)` the components of `e^{it/ε²}ψ`.
fn leading_terms(phi: &SpinorField, eps: f64) -> TwoSpinorField {
    let chi = upper(phi);
    let eta = lower(phi);
    // ½iεσ·∇ has symbol −½ε σ·ξ
    let s: TwoSpinorField = chi.map_modes(|_, xi, a| {
        let v = sigma_dot_mul(xi, a);
        v.map(|z| -0.5 * eps * z)
    });
    &eta + &s
}

fn check_uniform(states: &[DmState]) -> Result<f64> {
    if states.len() < 2 {
        return Ok(0.0);
    }
    let h = states[1].t - states[0].t;
    if !(h > 0.0) || states.windows(2).any(|w| ((w[1].t - w[0].t) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(invalid("states", "samples must be uniformly spaced in time"));
    }
    if states.iter().any(|s| s.eps != states[0].eps) {
        return Err(invalid("states", "mixed eps values"));
    }
    Ok(h)
}

/// Residual series of the naive expansion along a uniformly sampled run.
pub fn naive_expansion_check(states: &[DmState], dealias: bool) -> Result<Vec<NaiveResidual>> {
    let h = check_uniform(states)?;
    let phis: Vec<SpinorField> = states.iter().map(demodulated).collect();
    (0..states.len())
        .map(|k| {
            let s = &states[k];
            let eps = s.eps;
            let lead = leading_terms(&phis[k], eps);
            let leading = l2_norm(&lead);
            let full = if k == 0 || k + 1 == states.len() {
                None
            } else {
                let d_eta = (&lower(&phis[k + 1]) - &lower(&phis[k - 1])).scale(Complex64::from(0.5 / h));
                let chi = upper(&phis[k]);
                let eta = lower(&phis[k]);
                let a0 = s.a0(dealias);
                let extra = TwoSpinorField::from_index_fn(s.lattice(), |i| {
                    let (dt, e, c) = (d_eta.at(i), eta.at(i), chi.at(i));
                    let av = s.a.at(i);
                    let ac = sigma_dot_mul(av, c);
                    let p = a0.at(i)[0];
                    std::array::from_fn(|m| 0.5 * eps * eps * (I * dt[m] + p * e[m] + ac[m]))
                });
                Some(l2_norm(&(&lead + &extra)))
            };
            Ok(NaiveResidual {
                t: s.t,
                leading,
                full,
            })
        })
        .collect()
}
