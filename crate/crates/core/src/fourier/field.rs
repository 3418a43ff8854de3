use std::borrow::Cow;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::Lattice;
use crate::error::{Error, Result};
use crate::par;

/// Complex grid function with `C` components, stored in physical space.
#[derive(Clone, Debug)]
pub struct CField<const C: usize> {
    lattice: Lattice,
    comps: [Vec<Complex64>; C],
}

/// Real grid function with `C` components, stored in physical space.
#[derive(Clone, Debug)]
pub struct RField<const C: usize> {
    lattice: Lattice,
    comps: [Vec<f64>; C],
}

pub type ComplexField = CField<1>;
pub type TwoSpinorField = CField<2>;
pub type SpinorField = CField<4>;
pub type ScalarField = RField<1>;
pub type VectorField = RField<3>;

/// Normalized Fourier coefficients of each component.
pub type Spectra<const C: usize> = [Vec<Complex64>; C];

/// Read access shared by every field flavour; norms are written against it.
pub trait GridField: Sync {
    fn lattice(&self) -> &Lattice;
    fn components(&self) -> usize;
    fn complex_component(&self, c: usize) -> Cow<'_, [Complex64]>;
    /// `Σ_c |f_c(x)|²` at grid point `idx`.
    fn abs2_at(&self, idx: usize) -> f64;
    /// Mean of each component (zero Fourier mode).
    fn means(&self) -> Vec<Complex64> {
        (0..self.components())
            .map(|c| {
                let d = self.complex_component(c);
                let re = par::sum_range(d.len(), |i| d[i].re);
                let im = par::sum_range(d.len(), |i| d[i].im);
                Complex64::new(re, im) / d.len() as f64
            })
            .collect()
    }
}

pub(crate) fn check_same(a: &Lattice, b: &Lattice) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::LatticeMismatch)
    }
}

/// Per-mode map from `C` input spectra to `D` output spectra.
pub(crate) fn modewise<const C: usize, const D: usize, F>(
    lattice: &Lattice,
    input: &Spectra<C>,
    f: F,
) -> Spectra<D>
where
    F: Fn(usize, [f64; 3], [Complex64; C]) -> [Complex64; D] + Sync + Send,
{
    let out = par::map_range(lattice.len(), |idx| {
        let v = std::array::from_fn(|c| input[c][idx]);
        f(idx, lattice.wavevector(idx), v)
    });
    deinterleave(out)
}

pub(crate) fn deinterleave<T: Copy + Send + Sync, const D: usize>(v: Vec<[T; D]>) -> [Vec<T>; D] {
    std::array::from_fn(|d| v.iter().map(|x| x[d]).collect())
}

impl<const C: usize> CField<C> {
    pub fn zeros(lattice: &Lattice) -> Self {
        Self {
            lattice: lattice.clone(),
            comps: std::array::from_fn(|_| vec![Complex64::default(); lattice.len()]),
        }
    }

    pub fn from_components(lattice: &Lattice, comps: [Vec<Complex64>; C]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != lattice.len()) {
            return Err(Error::LatticeMismatch);
        }
        Ok(Self {
            lattice: lattice.clone(),
            comps,
        })
    }

    /// Sample `f(x)` at every grid point.
    pub fn from_fn<F>(lattice: &Lattice, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [Complex64; C] + Sync + Send,
    {
        let v = par::map_range(lattice.len(), |i| f(lattice.position(i)));
        Self {
            lattice: lattice.clone(),
            comps: deinterleave(v),
        }
    }

    /// Build from point values computed from the grid index.
    pub fn from_index_fn<F>(lattice: &Lattice, f: F) -> Self
    where
        F: Fn(usize) -> [Complex64; C] + Sync + Send,
    {
        let v = par::map_range(lattice.len(), f);
        Self {
            lattice: lattice.clone(),
            comps: deinterleave(v),
        }
    }

    pub fn from_spectra(lattice: &Lattice, mut spectra: Spectra<C>) -> Self {
        for s in spectra.iter_mut() {
            lattice.inverse(s);
        }
        Self {
            lattice: lattice.clone(),
            comps: spectra,
        }
    }

    pub fn spectra(&self) -> Spectra<C> {
        let mut s = self.comps.clone();
        for c in s.iter_mut() {
            self.lattice.forward(c);
        }
        s
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn comp(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut Vec<Complex64> {
        &mut self.comps[c]
    }

    pub fn comps(&self) -> &[Vec<Complex64>; C] {
        &self.comps
    }

    pub fn into_comps(self) -> [Vec<Complex64>; C] {
        self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [Complex64; C] {
        std::array::from_fn(|c| self.comps[c][idx])
    }

    /// Pointwise map to a field with `D` components.
    pub fn map_points<const D: usize, F>(&self, f: F) -> CField<D>
    where
        F: Fn(usize, [Complex64; C]) -> [Complex64; D] + Sync + Send,
    {
        CField::from_index_fn(&self.lattice, |i| f(i, self.at(i)))
    }

    /// Apply a per-mode map in Fourier space.
    pub fn map_modes<const D: usize, F>(&self, f: F) -> CField<D>
    where
        F: Fn(usize, [f64; 3], [Complex64; C]) -> [Complex64; D] + Sync + Send,
    {
        let s = modewise(&self.lattice, &self.spectra(), f);
        CField::from_spectra(&self.lattice, s)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        self.map_points(|_, v| v.map(|z| z * k))
    }

    /// `self + k·other`.
    pub fn axpy(&self, k: Complex64, other: &Self) -> Result<Self> {
        check_same(&self.lattice, &other.lattice)?;
        Ok(self.map_points(|i, v| std::array::from_fn(|c| v[c] + k * other.comps[c][i])))
    }

    /// Zero every mode outside the 2/3-rule band.
    pub fn dealiased(&self) -> Self {
        let l = self.lattice.clone();
        self.map_modes(|idx, _, v| {
            if l.dealias_keeps(idx) {
                v
            } else {
                [Complex64::default(); C]
            }
        })
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn real_part(&self) -> RField<C> {
        RField {
            lattice: self.lattice.clone(),
            comps: std::array::from_fn(|c| self.comps[c].iter().map(|z| z.re).collect()),
        }
    }

    /// Largest imaginary part over all components.
    pub fn max_imag(&self) -> f64 {
        (0..C)
            .map(|c| par::max_range(self.lattice.len(), |i| self.comps[c][i].im.abs()))
            .fold(0.0, f64::max)
    }

    /// Largest pointwise component difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..C)
            .map(|c| {
                par::max_range(self.lattice.len(), |i| {
                    (self.comps[c][i] - other.comps[c][i]).norm()
                })
            })
            .fold(0.0, f64::max)
    }
}

impl ComplexField {
    pub fn values(&self) -> &[Complex64] {
        &self.comps[0]
    }

    pub fn from_values(lattice: &Lattice, v: Vec<Complex64>) -> Result<Self> {
        Self::from_components(lattice, [v])
    }
}

impl<const C: usize> RField<C> {
    pub fn zeros(lattice: &Lattice) -> Self {
        Self {
            lattice: lattice.clone(),
            comps: std::array::from_fn(|_| vec![0.0; lattice.len()]),
        }
    }

    pub fn from_components(lattice: &Lattice, comps: [Vec<f64>; C]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != lattice.len()) {
            return Err(Error::LatticeMismatch);
        }
        Ok(Self {
            lattice: lattice.clone(),
            comps,
        })
    }

    pub fn from_fn<F>(lattice: &Lattice, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; C] + Sync + Send,
    {
        let v = par::map_range(lattice.len(), |i| f(lattice.position(i)));
        Self {
            lattice: lattice.clone(),
            comps: deinterleave(v),
        }
    }

    pub fn from_index_fn<F>(lattice: &Lattice, f: F) -> Self
    where
        F: Fn(usize) -> [f64; C] + Sync + Send,
    {
        let v = par::map_range(lattice.len(), f);
        Self {
            lattice: lattice.clone(),
            comps: deinterleave(v),
        }
    }

    /// Real part of the inverse transform of `spectra`.
    pub fn from_spectra(lattice: &Lattice, spectra: Spectra<C>) -> Self {
        let c = CField::from_spectra(lattice, spectra);
        c.real_part()
    }

    pub fn spectra(&self) -> Spectra<C> {
        self.to_complex().spectra()
    }

    pub fn to_complex(&self) -> CField<C> {
        CField {
            lattice: self.lattice.clone(),
            comps: std::array::from_fn(|c| {
                self.comps[c].iter().map(|&x| Complex64::new(x, 0.0)).collect()
            }),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut Vec<f64> {
        &mut self.comps[c]
    }

    pub fn comps(&self) -> &[Vec<f64>; C] {
        &self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; C] {
        std::array::from_fn(|c| self.comps[c][idx])
    }

    pub fn map_points<const D: usize, F>(&self, f: F) -> RField<D>
    where
        F: Fn(usize, [f64; C]) -> [f64; D] + Sync + Send,
    {
        RField::from_index_fn(&self.lattice, |i| f(i, self.at(i)))
    }

    /// Per-mode map in Fourier space; the result keeps the real part.
    pub fn map_modes<const D: usize, F>(&self, f: F) -> RField<D>
    where
        F: Fn(usize, [f64; 3], [Complex64; C]) -> [Complex64; D] + Sync + Send,
    {
        let s = modewise(&self.lattice, &self.spectra(), f);
        RField::from_spectra(&self.lattice, s)
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map_points(|_, v| v.map(|x| x * k))
    }

    pub fn axpy(&self, k: f64, other: &Self) -> Result<Self> {
        check_same(&self.lattice, &other.lattice)?;
        Ok(self.map_points(|i, v| std::array::from_fn(|c| v[c] + k * other.comps[c][i])))
    }

    pub fn dealiased(&self) -> Self {
        let l = self.lattice.clone();
        self.map_modes(|idx, _, v| {
            if l.dealias_keeps(idx) {
                v
            } else {
                [Complex64::default(); C]
            }
        })
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|x| x.is_finite()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..C)
            .map(|c| {
                par::max_range(self.lattice.len(), |i| {
                    (self.comps[c][i] - other.comps[c][i]).abs()
                })
            })
            .fold(0.0, f64::max)
    }
}

impl ScalarField {
    pub fn values(&self) -> &[f64] {
        &self.comps[0]
    }

    pub fn from_values(lattice: &Lattice, v: Vec<f64>) -> Result<Self> {
        Self::from_components(lattice, [v])
    }

    pub fn constant(lattice: &Lattice, c: f64) -> Self {
        Self::from_index_fn(lattice, |_| [c])
    }
}

impl VectorField {
    pub fn constant(lattice: &Lattice, v: [f64; 3]) -> Self {
        Self::from_index_fn(lattice, |_| v)
    }
}

impl<const C: usize> GridField for CField<C> {
    fn lattice(&self) -> &Lattice {
        &self.lattice
    }
    fn components(&self) -> usize {
        C
    }
    fn complex_component(&self, c: usize) -> Cow<'_, [Complex64]> {
        Cow::Borrowed(&self.comps[c])
    }
    fn abs2_at(&self, idx: usize) -> f64 {
        self.comps.iter().map(|c| c[idx].norm_sqr()).sum()
    }
}

impl<const C: usize> GridField for RField<C> {
    fn lattice(&self) -> &Lattice {
        &self.lattice
    }
    fn components(&self) -> usize {
        C
    }
    fn complex_component(&self, c: usize) -> Cow<'_, [Complex64]> {
        Cow::Owned(self.comps[c].iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }
    fn abs2_at(&self, idx: usize) -> f64 {
        self.comps.iter().map(|c| c[idx] * c[idx]).sum()
    }
}

macro_rules! field_arith {
    ($ty:ident, $scalar:ty) => {
        impl<const C: usize> Add for &$ty<C> {
            type Output = $ty<C>;
            fn add(self, rhs: Self) -> $ty<C> {
                assert!(self.lattice == rhs.lattice, "lattice mismatch");
                self.map_points(|i, v| std::array::from_fn(|c| v[c] + rhs.comps[c][i]))
            }
        }

        impl<const C: usize> Sub for &$ty<C> {
            type Output = $ty<C>;
            fn sub(self, rhs: Self) -> $ty<C> {
                assert!(self.lattice == rhs.lattice, "lattice mismatch");
                self.map_points(|i, v| std::array::from_fn(|c| v[c] - rhs.comps[c][i]))
            }
        }

        impl<const C: usize> Neg for &$ty<C> {
            type Output = $ty<C>;
            fn neg(self) -> $ty<C> {
                self.map_points(|_, v| v.map(|x| -x))
            }
        }

        impl<const C: usize> Mul<$scalar> for &$ty<C> {
            type Output = $ty<C>;
            fn mul(self, k: $scalar) -> $ty<C> {
                self.map_points(|_, v| v.map(|x| x * k))
            }
        }
    };
}

field_arith!(CField, Complex64);
field_arith!(RField, f64);

impl<const C: usize> Mul<f64> for &CField<C> {
    type Output = CField<C>;
    fn mul(self, k: f64) -> CField<C> {
        self.map_points(|_, v| v.map(|x| x * k))
    }
}
