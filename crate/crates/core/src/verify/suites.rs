//! Named check suites with pass/fail per check.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;

use super::data::{DataFamily, DataSpec};
use super::null::{free_dirac_u_residual, null_identity_one_sides};
use super::random;
use super::squared::squared_dirac_check;
use crate::dm::{simulate_dm, DmState, SimOptions, StepConfig};
use crate::error::{invalid, Result};
use crate::fourier::symbol::{h_symbol, lambda_symbol, norm2};
use crate::fourier::{l2_norm, Lattice, SpinorField};
use crate::spinor::{dirac_matrices, dirac_symbol_mul, pi_eps_mode, Branch};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// Residual, or number of violations for pointwise sweeps.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value.is_finite() && value < tolerance,
        }
    }

    fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: hi,
            passed: value >= lo && value <= hi,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} value={:.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.tolerance
        )
    }
}

pub const SUITES: [&str; 8] = [
    "matrices",
    "projections",
    "algebra",
    "symbols",
    "null-1",
    "null-2",
    "squared",
    "all",
];

/// Run a suite by name.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CheckResult>> {
    Ok(match name {
        "matrices" => matrices(),
        "projections" => projections()?,
        "algebra" => {
            let mut v = matrices();
            v.extend(projections()?);
            v
        }
        "symbols" => symbols(),
        "null-1" => null_one(seed)?,
        "null-2" => null_two(seed)?,
        "squared" => squared()?,
        "all" => {
            let mut v = Vec::new();
            for s in &SUITES[..SUITES.len() - 1] {
                if *s != "algebra" {
                    v.extend(run_suite(s, seed)?);
                }
            }
            v
        }
        other => {
            return Err(invalid(
                "suite",
                format!("unknown suite `{other}` (known: {})", SUITES.join(", ")),
            ))
        }
    })
}

fn max_entry(m: &Matrix4<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `α^jα^k + α^kα^j = 2δ^{jk}` and `α^jα^k = δ^{jk} + iε^{jkl}S^l`, entrywise.
pub fn matrices() -> Vec<CheckResult> {
    let d = dirac_matrices();
    let id = Matrix4::<Complex64>::identity();
    let i = Complex64::new(0.0, 1.0);
    let levi = |j: usize, k: usize, l: usize| -> f64 {
        match (j, k, l) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    let mut anti = 0.0_f64;
    let mut prod = 0.0_f64;
    for j in 0..3 {
        for k in 0..3 {
            let delta = if j == k { 1.0 } else { 0.0 };
            let ajk = d.alpha[j] * d.alpha[k];
            anti = anti.max(max_entry(&(ajk + d.alpha[k] * d.alpha[j] - id * Complex64::from(2.0 * delta))));
            let mut rhs = id * Complex64::from(delta);
            for l in 0..3 {
                rhs += d.spin[l] * (i * levi(j, k, l));
            }
            prod = prod.max(max_entry(&(ajk - rhs)));
        }
    }
    let mut g0 = 0.0_f64;
    for j in 0..3 {
        g0 = g0.max(max_entry(&(d.alpha[j] * d.gamma0 + d.gamma0 * d.alpha[j])));
    }
    g0 = g0.max(max_entry(&(d.gamma0 * d.gamma0 - id)));
    vec![
        CheckResult::below("matrices/anticommutator", anti, 1e-15),
        CheckResult::below("matrices/product", prod, 1e-15),
        CheckResult::below("matrices/gamma0", g0, 1e-15),
    ]
}

fn mode_matrix<F: Fn([Complex64; 4]) -> [Complex64; 4]>(f: F) -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    for c in 0..4 {
        let mut e = [Complex64::default(); 4];
        e[c] = Complex64::from(1.0);
        let col = f(e);
        for r in 0..4 {
            m[(r, c)] = col[r];
        }
    }
    m
}

/// Per-mode projection identities on a 16³ lattice for ε ∈ {1, 0.5, 0.25}.
pub fn projections() -> Result<Vec<CheckResult>> {
    let l = Lattice::new(16, 2.0 * PI)?;
    let id = Matrix4::<Complex64>::identity();
    let mut out = Vec::new();
    for eps in [1.0, 0.5, 0.25] {
        let (mut idem, mut orth, mut comp, mut spec) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
        for idx in 0..l.len() {
            let xi = l.wavevector(idx);
            let p = mode_matrix(|v| pi_eps_mode(eps, xi, Branch::Plus, v));
            let m = mode_matrix(|v| pi_eps_mode(eps, xi, Branch::Minus, v));
            let q = mode_matrix(|v| dirac_symbol_mul(eps, xi, v));
            let lam = Complex64::from(lambda_symbol(eps, xi));
            idem = idem.max(max_entry(&(p * p - p))).max(max_entry(&(m * m - m)));
            orth = orth.max(max_entry(&(p * m))).max(max_entry(&(m * p)));
            comp = comp.max(max_entry(&(p + m - id)));
            spec = spec.max(max_entry(&(q - (p - m) * lam)) / lam.re);
        }
        out.push(CheckResult::below(format!("projections/idempotent eps={eps}"), idem, 1e-12));
        out.push(CheckResult::below(format!("projections/orthogonal eps={eps}"), orth, 1e-12));
        out.push(CheckResult::below(format!("projections/complete eps={eps}"), comp, 1e-12));
        out.push(CheckResult::below(format!("projections/spectral eps={eps}"), spec, 1e-12));
    }
    Ok(out)
}

/// Pointwise on a 32³ lattice for ε ∈ {1/8, 1/4, 1/2, 1}:
/// `0 ≤ 1 − λ⁻¹ ≤ min{1, ε|ξ|, ε²|ξ|²}` and `0 ≤ |ξ|/ε − h_ε ≤ ε⁻²`.
/// Each inequality is allowed a relative round-off slack of `1e-14`.
pub fn symbols() -> Vec<CheckResult> {
    let l = Lattice::new(32, 2.0 * PI).expect("valid lattice");
    let slack = 1e-14;
    let mut out = Vec::new();
    for eps in [0.125, 0.25, 0.5, 1.0] {
        let (mut bound, mut h_est) = (0_usize, 0_usize);
        for idx in 0..l.len() {
            let xi = l.wavevector(idx);
            let k = norm2(xi).sqrt();
            let v = 1.0 - 1.0 / lambda_symbol(eps, xi);
            let cap = 1.0_f64.min(eps * k).min(eps * eps * k * k);
            if v < -slack || v > cap * (1.0 + slack) {
                bound += 1;
            }
            let d = k / eps - h_symbol(eps, xi);
            let top = 1.0 / (eps * eps);
            if d < -slack * (k / eps).max(1.0) || d > top * (1.0 + slack) {
                h_est += 1;
            }
        }
        out.push(CheckResult::below(format!("symbols/lambda-bound eps={eps}"), bound as f64, 0.5));
        out.push(CheckResult::below(format!("symbols/h-estimate eps={eps}"), h_est as f64, 0.5));
    }
    out
}

/// First null identity on dealiased 24³ grids: 10 random divergence-free
/// `A` with random `ψ`, for ε ∈ {0.5, 0.25}.
pub fn null_one(seed: u64) -> Result<Vec<CheckResult>> {
    let l = Lattice::new(24, 2.0 * PI)?;
    let mut out = Vec::new();
    for eps in [0.5_f64, 0.25] {
        let mut rng = random::rng(seed ^ eps.to_bits());
        let mut worst = 0.0_f64;
        for _ in 0..10 {
            let a = random::divergence_free(&l, 2.0, &mut rng);
            let psi: SpinorField = random::smooth_field(&l, 2.0, &mut rng);
            let (lhs, rhs) = null_identity_one_sides(&a, &psi)?;
            worst = worst.max(l2_norm(&(&lhs - &rhs)) / l2_norm(&lhs));
        }
        out.push(CheckResult::below(format!("null-1/relative eps={eps}"), worst, 1e-10));
    }
    Ok(out)
}

/// Second null identity along the exact free Dirac flow, with `U` from the
/// time-stepped wave solver at `dt ∈ {4, 2, 1}·10⁻³`: ε = 0.5, 24³,
/// `T = 0.25`.
pub fn null_two(seed: u64) -> Result<Vec<CheckResult>> {
    let l = Lattice::new(24, 2.0 * PI)?;
    let mut rng = random::rng(seed);
    let psi0: SpinorField = random::smooth_field(&l, 1.5, &mut rng);
    let a = random::divergence_free(&l, 1.5, &mut rng);
    let da = random::divergence_free(&l, 1.5, &mut rng);
    let r = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| free_dirac_u_residual(&psi0, 0.5, 0.25, dt, &a, &da))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![
        CheckResult::within("null-2/halving ratio 1", r[0] / r[1], 3.0, 5.0),
        CheckResult::within("null-2/halving ratio 2", r[1] / r[2], 3.0, 5.0),
        CheckResult::below("null-2/residual dt=1e-3", r[2], 1e-5),
    ])
}

/// Squared Dirac residual on a smooth coupled run, ε = 0.5, 16³, `T = 0.05`,
/// under dt halving.
pub fn squared() -> Result<Vec<CheckResult>> {
    let l = Lattice::new(16, 2.0 * PI)?;
    let mut spec = DataSpec::new(DataFamily::PositiveEnergy);
    spec.plus.width = 1.6;
    spec.magnetic_amplitude = 0.3;
    let init: DmState = spec.initial_state(&l, 0.5)?;
    let opts = SimOptions {
        sample_every: 1,
        h1_ceiling: 1e6,
        keep_states: true,
    };
    let r = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| -> Result<f64> {
            let traj = simulate_dm(&init, 0.05, &StepConfig::new(dt), &opts)?;
            let res = squared_dirac_check(&traj.states, false)?;
            Ok(res.iter().map(|x| x.residual).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![
        CheckResult::within("squared/halving ratio 1", r[0] / r[1], 3.0, 5.0),
        CheckResult::within("squared/halving ratio 2", r[1] / r[2], 3.0, 5.0),
    ])
}
