use num_complex::Complex64;

use super::sp::{kinetic_step, LimitDiagnostics};
use crate::dm::{step_count, DIVERGENCE_TOLERANCE};
use crate::error::{invalid, Error, Result};
use crate::fourier::{
    self, check_same, h1_norm, Lattice, ScalarField, TwoSpinorField, VectorField,
};
use crate::spinor::{check_eps, sigma_dot_mul, total_charge, Branch};

/// Pauli spinor `χ_P` at time `t`; the potentials are supplied per step.
#[derive(Clone, Debug)]
pub struct PauliState {
    pub t: f64,
    pub eps: f64,
    pub chi: TwoSpinorField,
}

impl PauliState {
    /// `ε = 0` is allowed here: the equation then has no magnetic coupling.
    pub fn new(chi: TwoSpinorField, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(invalid("eps", format!("must be finite and non-negative (got {eps})")));
        }
        if eps > 0.0 {
            check_eps(eps)?;
        }
        Ok(Self { t: 0.0, eps, chi })
    }
}

/// Pointwise flow of `i∂ₜχ = (a + b·σ)χ`:
/// `e^{−iτa}(cos(τ|b|) − i sin(τ|b|) b̂·σ)χ`.
fn pauli_kick(
    chi: &TwoSpinorField,
    a: &[f64],
    b: &VectorField,
    tau: f64,
) -> TwoSpinorField {
    chi.map_points(|i, v| {
        let bv = b.at(i);
        let nb = (bv[0] * bv[0] + bv[1] * bv[1] + bv[2] * bv[2]).sqrt();
        let ph = Complex64::from_polar(1.0, -tau * a[i]);
        if nb == 0.0 {
            return v.map(|z| ph * z);
        }
        let (s, c) = (tau * nb).sin_cos();
        let unit = bv.map(|x| x / nb);
        let sv = sigma_dot_mul(unit, v);
        let k = Complex64::new(0.0, -s);
        [ph * (c * v[0] + k * sv[0]), ph * (c * v[1] + k * sv[1])]
    })
}

/// `Kχ = ½Σ_j (A_j∂_jχ + ∂_j(A_jχ))`, skew-adjoint on the grid.
fn transport(chi: &TwoSpinorField, a: &VectorField) -> TwoSpinorField {
    let l = chi.lattice();
    let mut out = TwoSpinorField::zeros(l);
    for j in 0..3 {
        let aj = a.comp(j);
        let d = fourier::partial(chi, j);
        let prod = chi.map_points(|i, v| v.map(|z| z * aj[i]));
        let dprod = fourier::partial(&prod, j);
        let term = TwoSpinorField::from_index_fn(l, |i| {
            let (x, y) = (d.at(i), dprod.at(i));
            [0.5 * (aj[i] * x[0] + y[0]), 0.5 * (aj[i] * x[1] + y[1])]
        });
        out = &out + &term;
    }
    out
}

/// `e^{τεK}χ` by a Taylor series, with substeps keeping each series argument
/// below one in norm.
fn magnetic_transport(chi: &TwoSpinorField, a: &VectorField, scale: f64) -> TwoSpinorField {
    if scale == 0.0 {
        return chi.clone();
    }
    let l = chi.lattice();
    let amax = (0..3)
        .flat_map(|j| a.comp(j).iter().map(|x| x.abs()))
        .fold(0.0, f64::max);
    if amax == 0.0 {
        return chi.clone();
    }
    let kmax = (0..l.n()).map(|i| l.wavevector(i).iter().map(|x| x * x).sum::<f64>()).fold(0.0, f64::max);
    let bound = scale.abs() * amax * kmax.sqrt();
    let sub = bound.ceil().max(1.0) as usize;
    let h = scale / sub as f64;
    let mut cur = chi.clone();
    for _ in 0..sub {
        let base = fourier::l2_norm(&cur).max(f64::MIN_POSITIVE);
        let mut term = cur.clone();
        let mut sum = cur.clone();
        for k in 1..=60 {
            term = transport(&term, a).scale(Complex64::new(h / k as f64, 0.0));
            sum = &sum + &term;
            if fourier::l2_norm(&term) < 1e-17 * base {
                break;
            }
        }
        cur = sum;
    }
    cur
}

/// Strang step of
/// `i∂ₜχ = ½(i∇+εA)²χ − A₀χ − ½εB·σχ`
/// with the potentials frozen over the step (callers pass midpoint values).
///
/// Stages: half pointwise kick for `½ε²|A|² − A₀ − ½εB·σ`, half magnetic
/// transport `e^{(dt/2)εK}` (the flow of the cross term `iεA·∇`), exact
/// kinetic flow over `dt`, then the same two half stages in reverse order.
/// Every stage is unitary. `b` defaults to `∇×A`.
pub fn pauli_step(
    s: &PauliState,
    a0: &ScalarField,
    a: &VectorField,
    b: Option<&VectorField>,
    dt: f64,
) -> Result<PauliState> {
    if !dt.is_finite() || dt == 0.0 {
        return Err(invalid("dt", format!("must be finite and nonzero (got {dt})")));
    }
    let l = s.chi.lattice();
    check_same(l, a0.lattice())?;
    check_same(l, a.lattice())?;
    let div = fourier::divergence_defect(a);
    if div > DIVERGENCE_TOLERANCE {
        return Err(Error::NotDivergenceFree(div));
    }
    let b = match b {
        Some(b) => {
            check_same(l, b.lattice())?;
            b.clone()
        }
        None => fourier::curl(a),
    };
    let eps = s.eps;
    let a0v = a0.comp(0);
    let scalar: Vec<f64> = (0..l.len())
        .map(|i| {
            let v = a.at(i);
            0.5 * eps * eps * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - a0v[i]
        })
        .collect();
    let zeeman = b.scale(-0.5 * eps);
    let half = 0.5 * dt;

    let chi = pauli_kick(&s.chi, &scalar, &zeeman, half);
    let chi = magnetic_transport(&chi, a, half * eps);
    let chi = kinetic_step(&chi, dt, Branch::Plus);
    let chi = magnetic_transport(&chi, a, half * eps);
    let chi = pauli_kick(&chi, &scalar, &zeeman, half);
    if !chi.is_finite() {
        return Err(Error::NonFinite { step: 0 });
    }
    Ok(PauliState {
        t: s.t + dt,
        eps,
        chi,
    })
}

/// Time-dependent potentials `(A₀, A, B)` for the Pauli equation.
pub trait GaugeSource {
    /// Potentials to freeze over `[t, t + dt]`.
    fn frozen(&self, t: f64, dt: f64) -> Result<(ScalarField, VectorField, VectorField)>;
}

/// Potentials recorded on a uniform time grid `t₀ + k·spacing`.
#[derive(Clone, Debug)]
pub struct RecordedGauge {
    pub t0: f64,
    pub spacing: f64,
    pub a0: Vec<ScalarField>,
    pub a: Vec<VectorField>,
    pub b: Vec<VectorField>,
}

impl RecordedGauge {
    pub fn new(
        t0: f64,
        spacing: f64,
        a0: Vec<ScalarField>,
        a: Vec<VectorField>,
        b: Vec<VectorField>,
    ) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(invalid("spacing", "must be positive"));
        }
        if a0.is_empty() || a0.len() != a.len() || a.len() != b.len() {
            return Err(invalid("gauge", "sample lists must be non-empty and of equal length"));
        }
        Ok(Self {
            t0,
            spacing,
            a0,
            a,
            b,
        })
    }

    /// Every potential identically zero.
    pub fn vanishing(lattice: &Lattice, t0: f64, spacing: f64, samples: usize) -> Result<Self> {
        Self::new(
            t0,
            spacing,
            vec![ScalarField::zeros(lattice); samples],
            vec![VectorField::zeros(lattice); samples],
            vec![VectorField::zeros(lattice); samples],
        )
    }

    fn index(&self, t: f64) -> Result<usize> {
        let r = (t - self.t0) / self.spacing;
        let k = r.round();
        if (r - k).abs() > 1e-6 || k < 0.0 || k as usize >= self.a0.len() {
            return Err(Error::SamplingMismatch {
                spacing: self.spacing,
                dt: t - self.t0,
            });
        }
        Ok(k as usize)
    }
}

impl GaugeSource for RecordedGauge {
    /// Mean of the samples at both ends of the step, a second-order midpoint
    /// value.
    fn frozen(&self, t: f64, dt: f64) -> Result<(ScalarField, VectorField, VectorField)> {
        if self.spacing > dt * (1.0 + 1e-9) {
            return Err(Error::SamplingMismatch {
                spacing: self.spacing,
                dt,
            });
        }
        let (i, j) = (self.index(t)?, self.index(t + dt)?);
        Ok((
            &(&self.a0[i] + &self.a0[j]) * 0.5,
            &(&self.a[i] + &self.a[j]) * 0.5,
            &(&self.b[i] + &self.b[j]) * 0.5,
        ))
    }
}

#[derive(Clone, Debug)]
pub struct PauliTrajectory {
    pub dt: f64,
    pub steps: usize,
    /// `(t, ‖χ_P‖²_{L²}, ‖χ_P‖_{H¹})` at every step.
    pub diagnostics: Vec<(f64, f64, f64)>,
    pub states: Vec<PauliState>,
}

/// Evolve `χ_P` in the potentials of `gauge` up to `t_final`.
pub fn simulate_pauli(
    init: &PauliState,
    gauge: &dyn GaugeSource,
    t_final: f64,
    dt: f64,
    keep_states: bool,
) -> Result<PauliTrajectory> {
    let steps = step_count(t_final, dt)?;
    let dt = t_final / steps as f64;
    let diag = |s: &PauliState| (s.t, total_charge(&s.chi), h1_norm(&s.chi));
    let mut traj = PauliTrajectory {
        dt,
        steps,
        diagnostics: vec![diag(init)],
        states: Vec::new(),
    };
    if keep_states {
        traj.states.push(init.clone());
    }
    let mut s = init.clone();
    for k in 1..=steps {
        let t = init.t + (k - 1) as f64 * dt;
        let (a0, a, b) = gauge.frozen(t, dt)?;
        s = pauli_step(&s, &a0, &a, Some(&b), dt).map_err(|e| match e {
            Error::NonFinite { .. } => Error::NonFinite { step: k },
            other => other,
        })?;
        s.t = init.t + k as f64 * dt;
        traj.diagnostics.push(diag(&s));
        if keep_states {
            traj.states.push(s.clone());
        }
    }
    Ok(traj)
}

/// Reuse of the limit diagnostics layout for a single Pauli spinor.
pub fn pauli_diagnostics(s: &PauliState) -> LimitDiagnostics {
    LimitDiagnostics {
        t: s.t,
        mass_plus: total_charge(&s.chi),
        mass_minus: 0.0,
        h1_plus: h1_norm(&s.chi),
        h1_minus: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const Z: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn constant_field_gives_zeeman_phase() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let (eps, bz, dt) = (0.5, 0.8, 0.1);
        let chi = TwoSpinorField::from_fn(&l, |_| [Complex64::new(1.0, 0.0), Z]);
        let s = PauliState::new(chi.clone(), eps).unwrap();
        let b = VectorField::constant(&l, [0.0, 0.0, bz]);
        let out = pauli_step(&s, &ScalarField::zeros(&l), &VectorField::zeros(&l), Some(&b), dt).unwrap();
        let want = chi.scale(Complex64::from_polar(1.0, eps * bz * dt / 2.0));
        assert!(out.chi.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn zero_inputs_are_identity() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let s = PauliState::new(TwoSpinorField::zeros(&l), 0.3).unwrap();
        let out = pauli_step(&s, &ScalarField::zeros(&l), &VectorField::zeros(&l), None, 0.2).unwrap();
        assert_eq!(out.chi.max_abs_diff(&s.chi), 0.0);
    }

    #[test]
    fn rejects_compressible_potential() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let a = VectorField::from_fn(&l, |x| [x[0].sin(), 0.0, 0.0]);
        let s = PauliState::new(TwoSpinorField::zeros(&l), 0.3).unwrap();
        let err = pauli_step(&s, &ScalarField::zeros(&l), &a, None, 0.1).unwrap_err();
        assert!(matches!(err, Error::NotDivergenceFree(_)));
    }

    #[test]
    fn sparse_gauge_samples_are_rejected() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let g = RecordedGauge::vanishing(&l, 0.0, 0.2, 6).unwrap();
        let s = PauliState::new(TwoSpinorField::zeros(&l), 0.3).unwrap();
        let err = simulate_pauli(&s, &g, 1.0, 0.1, false).unwrap_err();
        assert!(matches!(err, Error::SamplingMismatch { .. }));
        assert!(simulate_pauli(&s, &g, 1.0, 0.2, false).is_ok());
    }
}
