//! Seeded random band-limited test fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fourier::symbol::norm2;
use crate::fourier::{self, CField, Lattice, VectorField};

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random smooth field: Gaussian-weighted coefficients `e^{−|ξ|²/(2k₀²)}`
/// on the 2/3 band.
pub fn smooth_field<const C: usize, R: Rng>(lattice: &Lattice, k0: f64, rng: &mut R) -> CField<C> {
    let n = lattice.len();
    let mut spectra: [Vec<Complex64>; C] = std::array::from_fn(|_| vec![Complex64::default(); n]);
    for idx in 0..n {
        let keep = lattice.dealias_keeps(idx) && !lattice.is_nyquist(idx);
        let w = (-norm2(lattice.wavevector(idx)) / (2.0 * k0 * k0)).exp();
        for s in spectra.iter_mut() {
            let re: f64 = rng.random_range(-1.0..1.0);
            let im: f64 = rng.random_range(-1.0..1.0);
            if keep {
                s[idx] = Complex64::new(re, im) * w;
            }
        }
    }
    CField::from_spectra(lattice, spectra)
}

/// Random smooth real divergence-free vector field with zero mean.
pub fn divergence_free<R: Rng>(lattice: &Lattice, k0: f64, rng: &mut R) -> VectorField {
    let c: CField<3> = smooth_field(lattice, k0, rng);
    fourier::leray_project(&c.real_part()).map_modes(|idx, _, v| {
        if idx == 0 {
            [Complex64::default(); 3]
        } else {
            v
        }
    })
}
