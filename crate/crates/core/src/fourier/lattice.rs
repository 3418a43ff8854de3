use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::par;

/// Periodic cubic grid `[0, L)³` with `n` points per axis and its dual
/// frequency lattice `ξ = k·2π/L`, `k ∈ {−n/2, …, n/2−1}`.
///
/// The unmatched Nyquist index `k = −n/2` is reported by [`frequencies`]
/// but its component is replaced by 0 in [`wavevector`], which is what every
/// multiplier symbol is evaluated at. This keeps odd symbols (derivatives)
/// conjugate-symmetric on real fields.
///
/// Cloning is cheap: the FFT plans are shared.
///
/// [`frequencies`]: Lattice::frequencies
/// [`wavevector`]: Lattice::wavevector
#[derive(Clone)]
pub struct Lattice {
    inner: Arc<Inner>,
}

struct Inner {
    n: usize,
    period: f64,
    /// Symbol frequency per axis index (Nyquist entry zeroed).
    xi: Vec<f64>,
    /// Signed integer mode per axis index.
    modes: Vec<i64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice")
            .field("n", &self.inner.n)
            .field("period", &self.inner.period)
            .finish()
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.period == other.inner.period)
    }
}

impl Lattice {
    /// `make_lattice`: `n` must be even and at least 4, `period` positive.
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidLattice(format!(
                "grid_n must be even and >= 4 (got {n})"
            )));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidLattice(format!(
                "period must be positive and finite (got {period})"
            )));
        }
        let dk = 2.0 * PI / period;
        let modes: Vec<i64> = (0..n)
            .map(|j| if j < n / 2 { j as i64 } else { j as i64 - n as i64 })
            .collect();
        let xi = modes
            .iter()
            .map(|&k| if k == -(n as i64 / 2) { 0.0 } else { k as f64 * dk })
            .collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(Inner {
                n,
                period,
                xi,
                modes,
                fwd,
                inv,
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn period(&self) -> f64 {
        self.inner.period
    }

    /// Number of grid points, `n³`.
    pub fn len(&self) -> usize {
        self.inner.n.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.inner.period / self.inner.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.inner.period.powi(3)
    }

    /// Spacing of the dual lattice, `2π/L`.
    pub fn frequency_spacing(&self) -> f64 {
        2.0 * PI / self.inner.period
    }

    /// Per-axis frequencies in increasing order, `k·2π/L` for
    /// `k = −n/2, …, n/2−1`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.inner.n as i64;
        let dk = self.frequency_spacing();
        (-n / 2..n / 2).map(|k| k as f64 * dk).collect()
    }

    #[inline]
    pub fn split_index(&self, idx: usize) -> [usize; 3] {
        let n = self.inner.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    #[inline]
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let [i, j, k] = self.split_index(idx);
        [i as f64 * h, j as f64 * h, k as f64 * h]
    }

    /// Symbol frequency of spectral index `idx` (Nyquist components zeroed).
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.split_index(idx);
        let xi = &self.inner.xi;
        [xi[i], xi[j], xi[k]]
    }

    /// Signed integer mode numbers of spectral index `idx`.
    #[inline]
    pub fn integer_mode(&self, idx: usize) -> [i64; 3] {
        let [i, j, k] = self.split_index(idx);
        let m = &self.inner.modes;
        [m[i], m[j], m[k]]
    }

    /// Spectral index of integer mode `k` (each entry taken modulo `n`).
    pub fn mode_index(&self, k: [i64; 3]) -> usize {
        let n = self.inner.n as i64;
        let w = |m: i64| m.rem_euclid(n) as usize;
        (w(k[0]) * self.inner.n + w(k[1])) * self.inner.n + w(k[2])
    }

    /// True if any axis sits on the unmatched Nyquist index.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let half = -(self.inner.n as i64 / 2);
        self.integer_mode(idx).contains(&half)
    }

    /// 2/3-rule mask: keeps modes with `|k_j| <= n/3` on every axis.
    pub fn dealias_keeps(&self, idx: usize) -> bool {
        let cut = self.inner.n as i64 / 3;
        self.integer_mode(idx).iter().all(|&m| m.abs() <= cut)
    }

    /// In-place forward transform to normalized coefficients.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let scale = 1.0 / self.len() as f64;
        par::for_each_indexed(data, |_, v| *v *= scale);
    }

    /// In-place inverse transform from normalized coefficients.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    fn transform(&self, data: &mut [Complex64], forward: bool) {
        let n = self.inner.n;
        assert_eq!(data.len(), n * n * n, "field length does not match lattice");
        let plan = if forward { &self.inner.fwd } else { &self.inner.inv };
        let plane = n * n;

        // last axis: rows are contiguous
        par::for_each_chunk(data, plane, |_, p| plan.process(p));

        // middle axis: transpose each plane
        par::for_each_chunk(data, plane, |_, p| {
            let mut tmp = vec![Complex64::default(); plane];
            for j in 0..n {
                for k in 0..n {
                    tmp[k * n + j] = p[j * n + k];
                }
            }
            plan.process(&mut tmp);
            for j in 0..n {
                for k in 0..n {
                    p[j * n + k] = tmp[k * n + j];
                }
            }
        });

        // first axis: global transpose to pencils of length n
        let src: &[Complex64] = data;
        let mut pencils = par::map_range(n * plane, |q| {
            let (jk, i) = (q / n, q % n);
            src[i * plane + jk]
        });
        par::for_each_chunk(&mut pencils, plane, |_, p| plan.process(p));
        par::for_each_indexed(data, |idx, v| {
            let (i, jk) = (idx / plane, idx % plane);
            *v = pencils[jk * n + i];
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(Lattice::new(7, 1.0).is_err());
        assert!(Lattice::new(2, 1.0).is_err());
        assert!(Lattice::new(8, 0.0).is_err());
        assert!(Lattice::new(8, -1.0).is_err());
    }

    #[test]
    fn dual_lattice_of_small_grids() {
        let l = Lattice::new(4, 2.0 * PI).unwrap();
        let f = l.frequencies();
        let expect = [-2.0, -1.0, 0.0, 1.0];
        for (a, b) in f.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }

        let l = Lattice::new(8, 2.0 * PI).unwrap();
        assert_eq!(l.len(), 512);
        let max = l.frequencies().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        assert!((max - 4.0).abs() < 1e-15);

        let l = Lattice::new(8, 4.0 * PI).unwrap();
        assert!((l.frequency_spacing() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nyquist_component_is_zeroed_in_symbols() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let idx = l.mode_index([-4, 1, 0]);
        assert!(l.is_nyquist(idx));
        assert_eq!(l.wavevector(idx), [0.0, 1.0, 0.0]);
        assert_eq!(l.integer_mode(idx), [-4, 1, 0]);
    }

    #[test]
    fn forward_inverse_roundtrip() {
        let l = Lattice::new(6, 3.0).unwrap();
        let orig: Vec<Complex64> = (0..l.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let mut d = orig.clone();
        l.forward(&mut d);
        l.inverse(&mut d);
        let err = orig
            .iter()
            .zip(&d)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn plane_wave_lands_on_its_mode() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let mut d: Vec<Complex64> = (0..l.len())
            .map(|i| {
                let x = l.position(i);
                Complex64::from_polar(1.0, 2.0 * x[0] - x[2])
            })
            .collect();
        l.forward(&mut d);
        let target = l.mode_index([2, 0, -1]);
        for (i, v) in d.iter().enumerate() {
            let want = if i == target { 1.0 } else { 0.0 };
            assert!((v.norm() - want).abs() < 1e-12, "mode {i}");
        }
    }
}
