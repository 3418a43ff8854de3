//! Empirical probes of the dyadic bilinear estimates for free solutions
//!
//! ```text
//! □_ε u = 0, u(0) = f, ∂ₜu(0) = 0;     L±v = 0, v(0) = g,
//! ```
//!
//! both evolved exactly per mode: `û = f̂ cos(|ξ|t/ε)` and
//! `v̂ = ĝ e^{±ith_ε(ξ)}`. The spacetime norm of the product over `[0, T]` is
//! taken by the trapezoid rule; the spatial norm is exact because the
//! product is required to be representable on the lattice.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fourier::symbol::{h_symbol, lp_bump, norm2};
use crate::fourier::{Lattice, ComplexField};
use crate::par;
use crate::spinor::Branch;

/// Which part of the estimate is probed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProbeCase {
    /// `‖Δ_μ(u_λv_λ)‖ ≲ ε^{1/2}μ‖f_λ‖‖g_λ‖` for `μ ≲ λ ≲ 1/ε`.
    #[serde(rename = "i")]
    Low,
    /// `‖Δ_μ(u_λv_λ)‖ ≲ ε^{1/2}(μλ)^{1/2}‖f_λ‖‖g_λ‖` for `μ ≲ λ`, `λ ≫ 1/ε`.
    #[serde(rename = "ii")]
    High,
    /// `‖u_μv_λ‖ ≲ ε^{1/2}min(μ,λ)‖f_μ‖‖g_λ‖` for all `μ, λ`.
    #[serde(rename = "iii")]
    Off,
}

impl ProbeCase {
    pub fn name(self) -> &'static str {
        match self {
            ProbeCase::Low => "i",
            ProbeCase::High => "ii",
            ProbeCase::Off => "iii",
        }
    }

    /// Frequency scales of the data `(f, g)`.
    fn data_scales(self, mu: f64, lambda: f64) -> (f64, f64) {
        match self {
            ProbeCase::Low | ProbeCase::High => (lambda, lambda),
            ProbeCase::Off => (mu, lambda),
        }
    }

    fn bound(self, mu: f64, lambda: f64, eps: f64) -> f64 {
        eps.sqrt()
            * match self {
                ProbeCase::Low => mu,
                ProbeCase::High => (mu * lambda).sqrt(),
                ProbeCase::Off => mu.min(lambda),
            }
    }

    /// Whether `(μ, λ, ε)` lies in the regime of this case; "much larger"
    /// is read as at least a factor 2.
    pub fn admits(self, mu: f64, lambda: f64, eps: f64) -> bool {
        match self {
            ProbeCase::Low => mu <= lambda && lambda <= 1.0 / eps,
            ProbeCase::High => mu <= lambda && lambda >= 2.0 / eps,
            ProbeCase::Off => true,
        }
    }
}

/// Largest integer mode per axis inside the support of `β(|ξ|/s)`.
fn max_mode(lattice: &Lattice, s: f64) -> i64 {
    (2.0 * s / lattice.frequency_spacing()).ceil() as i64 - 1
}

/// Whether products of data at scales `a` and `b` are alias-free.
fn resolved(lattice: &Lattice, a: f64, b: f64) -> bool {
    max_mode(lattice, a) + max_mode(lattice, b) < lattice.n() as i64 / 2
}

fn check_scale(name: &'static str, s: f64, lattice: &Lattice) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid(name, format!("must be positive (got {s})")));
    }
    if s / 2.0 < lattice.frequency_spacing() / 2.0 {
        return Err(invalid(name, format!("{s} is below the lowest lattice frequency")));
    }
    Ok(())
}

/// Spacetime `L²` norm of `Δ_μ(uv)` (or of `uv` when `mu` is `None`).
fn product_norm(f: &ComplexField, g: &ComplexField, eps: f64, t_final: f64, mu: Option<f64>, branch: Branch) -> Result<f64> {
    let l = f.lattice();
    let fs = f.spectra();
    let gs = g.spectra();
    let (fs, gs) = (&fs[0], &gs[0]);
    let mut wu = 0.0_f64;
    let mut wv = 0.0_f64;
    let mut ku = 0_i64;
    let mut kv = 0_i64;
    // coefficients below this are transform round-off, not support
    let floor = |c: &[Complex64]| 1e-13 * c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (tf, tg) = (floor(fs), floor(gs));
    for idx in 0..l.len() {
        let xi = l.wavevector(idx);
        let k = l.integer_mode(idx).iter().map(|c| c.abs()).max().unwrap_or(0);
        if fs[idx].norm() > tf {
            wu = wu.max(norm2(xi).sqrt() / eps);
            ku = ku.max(k);
        }
        if gs[idx].norm() > tg {
            wv = wv.max(h_symbol(eps, xi));
            kv = kv.max(k);
        }
    }
    if ku + kv >= l.n() as i64 / 2 {
        return Err(invalid("lambda", "the product is not resolved by the lattice"));
    }
    let omega = wu + wv;
    let steps = if omega == 0.0 {
        1
    } else {
        (t_final * omega / 0.25).ceil().max(1.0) as usize
    };
    let h = t_final / steps as f64;
    let sign = branch.sign();
    let lp: Option<Vec<f64>> = mu.map(|m| (0..l.len()).map(|i| lp_bump(norm2(l.wavevector(i)).sqrt() / m)).collect());

    let sq = |t: f64| -> f64 {
        let mut u: Vec<Complex64> = (0..l.len())
            .map(|i| fs[i] * (norm2(l.wavevector(i)).sqrt() * t / eps).cos())
            .collect();
        let mut v: Vec<Complex64> = (0..l.len())
            .map(|i| gs[i] * Complex64::from_polar(1.0, sign * t * h_symbol(eps, l.wavevector(i))))
            .collect();
        l.inverse(&mut u);
        l.inverse(&mut v);
        let mut w: Vec<Complex64> = u.iter().zip(&v).map(|(a, b)| a * b).collect();
        match &lp {
            None => l.cell_volume() * par::sum_range(w.len(), |i| w[i].norm_sqr()),
            Some(m) => {
                l.forward(&mut w);
                l.volume() * par::sum_range(w.len(), |i| (m[i] * m[i]) * w[i].norm_sqr())
            }
        }
    };
    let mut total = 0.0;
    for k in 0..=steps {
        let wgt = if k == 0 || k == steps { 0.5 } else { 1.0 };
        total += wgt * sq(k as f64 * h);
    }
    Ok((h * total).sqrt())
}

/// Ratio of the measured norm to the right side of the estimate. Zero data
/// give ratio 0.
pub fn probe_ratio(
    case: ProbeCase,
    f: &ComplexField,
    g: &ComplexField,
    mu: f64,
    lambda: f64,
    eps: f64,
    t_final: f64,
) -> Result<f64> {
    crate::spinor::check_eps(eps)?;
    check_scale("mu", mu, f.lattice())?;
    check_scale("lambda", lambda, f.lattice())?;
    if !(t_final > 0.0) {
        return Err(invalid("t_final", "must be positive"));
    }
    let nf = crate::fourier::l2_norm(f);
    let ng = crate::fourier::l2_norm(g);
    if nf == 0.0 || ng == 0.0 {
        return Ok(0.0);
    }
    let mu_proj = match case {
        ProbeCase::Low | ProbeCase::High => Some(mu),
        ProbeCase::Off => None,
    };
    let num = product_norm(f, g, eps, t_final, mu_proj, Branch::Plus)?;
    Ok(num / (case.bound(mu, lambda, eps) * nf * ng))
}

/// Random data localized at scale `s`: coefficients `β(|ξ|/s)(a + ib)` with
/// `a, b` uniform in `[−1, 1]`.
pub fn localized_data<R: Rng>(lattice: &Lattice, s: f64, rng: &mut R) -> ComplexField {
    let mut spec = vec![Complex64::default(); lattice.len()];
    for (idx, c) in spec.iter_mut().enumerate() {
        let re: f64 = rng.random_range(-1.0..1.0);
        let im: f64 = rng.random_range(-1.0..1.0);
        if !lattice.is_nyquist(idx) {
            *c = Complex64::new(re, im) * lp_bump(norm2(lattice.wavevector(idx)).sqrt() / s);
        }
    }
    ComplexField::from_spectra(lattice, [spec])
}

/// `splitmix64` finalizer, used to derive one seed per cell and trial.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn cell_seed(seed: u64, case: ProbeCase, mu: f64, lambda: f64, eps: f64, trial: usize) -> u64 {
    let mut s = mix(seed);
    for v in [case as u64, mu.to_bits(), lambda.to_bits(), eps.to_bits(), trial as u64] {
        s = mix(s ^ v);
    }
    s
}

/// Ratios for `trials` random data pairs at one `(μ, λ, ε)`.
#[allow(clippy::too_many_arguments)]
pub fn dyadic_probe(
    lattice: &Lattice,
    case: ProbeCase,
    mu: f64,
    lambda: f64,
    eps: f64,
    trials: usize,
    seed: u64,
    t_final: f64,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    check_scale("mu", mu, lattice)?;
    check_scale("lambda", lambda, lattice)?;
    let (sf, sg) = case.data_scales(mu, lambda);
    if !resolved(lattice, sf, sg) {
        return Err(invalid(
            "lambda",
            format!("mu = {mu}, lambda = {lambda} exceed the lattice resolution (n = {})", lattice.n()),
        ));
    }
    (0..trials)
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(seed, case, mu, lambda, eps, trial));
            let f = localized_data(lattice, sf, &mut rng);
            let g = localized_data(lattice, sg, &mut rng);
            probe_ratio(case, &f, &g, mu, lambda, eps, t_final)
        })
        .collect()
}

fn default_period() -> f64 {
    2.0 * std::f64::consts::PI
}

fn default_t_final() -> f64 {
    1.0
}

/// A sweep over explicit `(μ, λ)` cells at one ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSweep {
    pub case: ProbeCase,
    pub n: usize,
    #[serde(default = "default_period")]
    pub period: f64,
    pub eps: f64,
    /// `[μ, λ]` pairs.
    pub cells: Vec<[f64; 2]>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub mu: f64,
    pub lambda: f64,
    pub eps: f64,
    pub trial: usize,
    pub ratio: f64,
}

/// Growth exponent in μ above which a sweep counts as trending.
pub const TREND_LIMIT: f64 = 0.5;
/// Largest accepted spread `max/median` of the ratios.
pub const SPREAD_LIMIT: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub case: ProbeCase,
    pub max: f64,
    pub median: f64,
    pub spread: f64,
    /// Largest least-squares slope of `log₂(max ratio)` against `log₂ μ`
    /// over the λ values with at least two μ; cases i and ii only.
    pub mu_trend: Option<f64>,
    pub passes: bool,
}

impl ProbeSweep {
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.n, self.period)
            .map_err(|_| invalid("n", format!("grid size must be even and >= 4 (got {})", self.n)))
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.lattice()?;
        crate::spinor::check_eps(self.eps)?;
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.cells.is_empty() {
            return Err(invalid("cells", "no (mu, lambda) cells"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(invalid("t_final", "must be positive"));
        }
        for &[mu, lambda] in &self.cells {
            check_scale("mu", mu, &l)?;
            check_scale("lambda", lambda, &l)?;
            if !self.case.admits(mu, lambda, self.eps) {
                return Err(invalid(
                    "cells",
                    format!("({mu}, {lambda}) is outside the regime of case {} at eps = {}", self.case.name(), self.eps),
                ));
            }
            let (a, b) = self.case.data_scales(mu, lambda);
            if !resolved(&l, a, b) {
                return Err(invalid(
                    "cells",
                    format!("({mu}, {lambda}) exceeds the lattice resolution (n = {})", self.n),
                ));
            }
        }
        Ok(())
    }

    /// All rows, cells in order and trials within each cell.
    pub fn run(&self) -> Result<Vec<ProbeRow>> {
        self.validate()?;
        let l = self.lattice()?;
        let jobs: Vec<(f64, f64, usize)> = self
            .cells
            .iter()
            .flat_map(|&[mu, lambda]| (0..self.trials).map(move |t| (mu, lambda, t)))
            .collect();
        let ratios = par::map_jobs(&jobs, |&(mu, lambda, trial)| -> Result<f64> {
            let (sf, sg) = self.case.data_scales(mu, lambda);
            let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(self.seed, self.case, mu, lambda, self.eps, trial));
            let f = localized_data(&l, sf, &mut rng);
            let g = localized_data(&l, sg, &mut rng);
            probe_ratio(self.case, &f, &g, mu, lambda, self.eps, self.t_final)
        });
        jobs.iter()
            .zip(ratios)
            .map(|(&(mu, lambda, trial), r)| {
                Ok(ProbeRow {
                    mu,
                    lambda,
                    eps: self.eps,
                    trial,
                    ratio: r?,
                })
            })
            .collect()
    }
}

pub const SWEEP_CSV_HEADER: &str = "mu,lambda,eps,trial,ratio";

pub fn sweep_csv(rows: &[ProbeRow]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{:e},{:e},{:e},{},{:e}", r.mu, r.lambda, r.eps, r.trial, r.ratio);
    }
    out
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Boundedness verdict for a sweep.
pub fn summarize(case: ProbeCase, rows: &[ProbeRow]) -> Result<ProbeSummary> {
    if rows.is_empty() {
        return Err(invalid("rows", "empty sweep"));
    }
    let mut r: Vec<f64> = rows.iter().map(|x| x.ratio).collect();
    r.sort_by(f64::total_cmp);
    let m = r.len();
    let median = if m % 2 == 1 { r[m / 2] } else { 0.5 * (r[m / 2 - 1] + r[m / 2]) };
    let max = r[m - 1];
    let spread = if median > 0.0 { max / median } else { f64::INFINITY };

    let mu_trend = match case {
        ProbeCase::Off => None,
        _ => {
            let mut lambdas: Vec<f64> = rows.iter().map(|x| x.lambda).collect();
            lambdas.sort_by(f64::total_cmp);
            lambdas.dedup();
            let mut worst: Option<f64> = None;
            for lam in lambdas {
                let mut mus: Vec<f64> = rows.iter().filter(|x| x.lambda == lam).map(|x| x.mu).collect();
                mus.sort_by(f64::total_cmp);
                mus.dedup();
                if mus.len() < 2 {
                    continue;
                }
                let peaks: Vec<f64> = mus
                    .iter()
                    .map(|&mu| {
                        rows.iter()
                            .filter(|x| x.lambda == lam && x.mu == mu)
                            .map(|x| x.ratio)
                            .fold(0.0, f64::max)
                    })
                    .collect();
                if peaks.iter().any(|p| !(*p > 0.0)) {
                    continue;
                }
                let x: Vec<f64> = mus.iter().map(|v| v.log2()).collect();
                let y: Vec<f64> = peaks.iter().map(|v| v.log2()).collect();
                let s = slope(&x, &y);
                worst = Some(worst.map_or(s, |w: f64| w.max(s)));
            }
            worst
        }
    };
    let passes = spread.is_finite() && spread < SPREAD_LIMIT && mu_trend.is_none_or(|s| s < TREND_LIMIT);
    Ok(ProbeSummary {
        case,
        max,
        median,
        spread,
        mu_trend,
        passes,
    })
}
