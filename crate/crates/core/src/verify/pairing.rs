//! Weak pairing of a current trajectory with a smooth space-time bump.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fourier::{Lattice, VectorField};

/// `G(t,x) = amp·φ((t − t_c)/τ)·Π_j exp(κ(cos(x_j − c_j) − 1))`, with
/// `φ(s) = exp(1 − 1/(1 − s²))` on `|s| < 1` and `κ = 1/width²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub t_center: f64,
    pub t_half_width: f64,
    /// Spatial center as a fraction of the period.
    #[serde(default = "Bump::default_center")]
    pub x_center: [f64; 3],
    pub width: f64,
    #[serde(default = "Bump::default_amplitude")]
    pub amplitude: f64,
}

impl Bump {
    fn default_center() -> [f64; 3] {
        [0.5; 3]
    }

    fn default_amplitude() -> f64 {
        1.0
    }

    /// Support must lie inside `[0, t_final]`.
    pub fn validate(&self, t_final: f64) -> Result<()> {
        if !(self.t_half_width > 0.0) {
            return Err(invalid("bump.t_half_width", "must be positive"));
        }
        if !(self.width > 0.0) {
            return Err(invalid("bump.width", "must be positive"));
        }
        let (a, b) = (self.t_center - self.t_half_width, self.t_center + self.t_half_width);
        if a < -1e-12 || b > t_final + 1e-12 {
            return Err(invalid(
                "bump",
                format!("support [{a}, {b}] exceeds the run window [0, {t_final}]"),
            ));
        }
        Ok(())
    }

    pub fn time_factor(&self, t: f64) -> f64 {
        let s = (t - self.t_center) / self.t_half_width;
        if s.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }

    pub fn space_factor(&self, lattice: &Lattice) -> Vec<f64> {
        let kappa = 1.0 / (self.width * self.width);
        let dk = lattice.frequency_spacing();
        let period = lattice.period();
        (0..lattice.len())
            .map(|i| {
                let x = lattice.position(i);
                (0..3)
                    .map(|j| (kappa * ((dk * (x[j] - self.x_center[j] * period)).cos() - 1.0)).exp())
                    .product::<f64>()
            })
            .collect()
    }
}

/// Trapezoidal accumulation of `∫∫ J_k G dt dx` over a stream of samples.
#[derive(Clone, Debug)]
pub struct PairingAccumulator {
    bump: Bump,
    space: Vec<f64>,
    cell: f64,
    last: Option<(f64, [f64; 3])>,
    first_t: Option<f64>,
    total: [f64; 3],
}

impl PairingAccumulator {
    pub fn new(bump: &Bump, lattice: &Lattice) -> Self {
        Self {
            bump: bump.clone(),
            space: bump.space_factor(lattice),
            cell: lattice.cell_volume(),
            last: None,
            first_t: None,
            total: [0.0; 3],
        }
    }

    fn spatial(&self, t: f64, j: &VectorField) -> [f64; 3] {
        let g = self.bump.amplitude * self.bump.time_factor(t);
        if g == 0.0 {
            return [0.0; 3];
        }
        std::array::from_fn(|k| {
            let c = j.comp(k);
            g * self.cell * c.iter().zip(&self.space).map(|(a, b)| a * b).sum::<f64>()
        })
    }

    pub fn push(&mut self, t: f64, j: &VectorField) {
        let v = self.spatial(t, j);
        if let Some((t0, v0)) = self.last {
            let h = t - t0;
            for k in 0..3 {
                self.total[k] += 0.5 * h * (v0[k] + v[k]);
            }
        } else {
            self.first_t = Some(t);
        }
        self.last = Some((t, v));
    }

    /// Per-component pairing; fails when the samples do not cover the
    /// support of the bump.
    pub fn finish(&self) -> Result<[f64; 3]> {
        let (a, b) = (
            self.bump.t_center - self.bump.t_half_width,
            self.bump.t_center + self.bump.t_half_width,
        );
        match (self.first_t, self.last) {
            (Some(t0), Some((t1, _))) if t0 <= a + 1e-12 && t1 >= b - 1e-12 => Ok(self.total),
            _ => Err(invalid("bump", "support is not covered by the sampled window")),
        }
    }
}

/// `∫∫ J·G dt dx` per component from samples `(t, J(t))`.
pub fn current_weak_pairing(samples: &[(f64, VectorField)], bump: &Bump) -> Result<[f64; 3]> {
    let Some((_, first)) = samples.first() else {
        return Err(invalid("samples", "no current samples"));
    };
    let mut acc = PairingAccumulator::new(bump, first.lattice());
    for (t, j) in samples {
        acc.push(*t, j);
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `I₀(κ)` by its power series.
    fn bessel_i0(k: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..60 {
            term *= (k / 2.0) * (k / 2.0) / (m * m) as f64;
            sum += term;
        }
        sum
    }

    #[test]
    fn constant_current_pairs_with_the_bump_mass() {
        let l = Lattice::new(16, 2.0 * PI).unwrap();
        let bump = Bump {
            t_center: 0.5,
            t_half_width: 0.4,
            x_center: [0.5; 3],
            width: 0.8,
            amplitude: 1.0,
        };
        let jv = [0.3, -1.0, 2.0];
        let j = VectorField::constant(&l, jv);
        let samples: Vec<(f64, VectorField)> =
            (0..=400).map(|k| (k as f64 / 400.0, j.clone())).collect();
        let p = current_weak_pairing(&samples, &bump).unwrap();
        // ∫_{-1}^{1} exp(1 − 1/(1−s²)) ds
        let time = std::f64::consts::E * 0.443_993_816_168_079_4 * 0.4;
        let kappa: f64 = 1.0 / 0.64;
        let space = (2.0 * PI * (-kappa).exp() * bessel_i0(kappa)).powi(3);
        for k in 0..3 {
            assert!((p[k] - jv[k] * time * space).abs() < 1e-6 * space, "{k}: {} vs {}", p[k], jv[k] * time * space);
        }
    }

    #[test]
    fn zero_bump_and_window_errors() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let mut bump = Bump {
            t_center: 0.5,
            t_half_width: 0.4,
            x_center: [0.5; 3],
            width: 0.8,
            amplitude: 0.0,
        };
        let j = VectorField::constant(&l, [1.0, 1.0, 1.0]);
        let samples: Vec<(f64, VectorField)> = (0..=10).map(|k| (k as f64 / 10.0, j.clone())).collect();
        assert_eq!(current_weak_pairing(&samples, &bump).unwrap(), [0.0; 3]);
        bump.t_half_width = 0.6;
        assert!(bump.validate(1.0).is_err());
        assert!(current_weak_pairing(&samples, &bump).is_err());
    }
}
