use super::GridField;
use crate::error::{invalid, Result};
use crate::par;

/// Sobolev norm from Fourier coefficients,
/// `‖f‖² = L³ Σ_ξ w(ξ) |f̂(ξ)|²`, with `w = (1+|ξ|²)^s` or, when
/// `homogeneous`, `w = |ξ|^{2s}` and the zero mode dropped. `s = 0` is the L²
/// norm over `[0, L)³`.
///
/// Weights use the true lattice frequency of every mode, including the
/// Nyquist index.
pub fn sobolev_norm<F: GridField + ?Sized>(f: &F, s: f64, homogeneous: bool) -> Result<f64> {
    let l = f.lattice();
    if homogeneous && s < 0.0 {
        let mean = f.means().iter().map(|m| m.norm()).fold(0.0, f64::max);
        if mean > 1e-14 {
            return Err(invalid(
                "s",
                format!("homogeneous norm with s = {s} < 0 is undefined for a field with nonzero mean ({mean:.3e})"),
            ));
        }
    }
    let dk = l.frequency_spacing();
    let weights = par::map_range(l.len(), |idx| {
        let k = l.integer_mode(idx);
        let k2 = dk * dk * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        if homogeneous {
            if idx == 0 {
                0.0
            } else if s == 1.0 {
                k2
            } else {
                k2.powf(s)
            }
        } else if s == 0.0 {
            1.0
        } else if s == 1.0 {
            1.0 + k2
        } else {
            (1.0 + k2).powf(s)
        }
    });
    let mut total = 0.0;
    for c in 0..f.components() {
        let mut spec = f.complex_component(c).into_owned();
        l.forward(&mut spec);
        total += par::sum_range(l.len(), |i| weights[i] * spec[i].norm_sqr());
    }
    Ok((l.volume() * total).sqrt())
}

/// Inhomogeneous `H¹` norm.
pub fn h1_norm<F: GridField + ?Sized>(f: &F) -> f64 {
    sobolev_norm(f, 1.0, false).expect("inhomogeneous norms are always defined")
}

/// L² norm by grid quadrature.
pub fn l2_norm<F: GridField + ?Sized>(f: &F) -> f64 {
    let l = f.lattice();
    (l.cell_volume() * par::sum_range(l.len(), |i| f.abs2_at(i))).sqrt()
}

/// `L^p` norm by grid quadrature with cell weight `(L/n)³`; `p = ∞` gives the
/// largest pointwise modulus.
pub fn lp_norm<F: GridField + ?Sized>(f: &F, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid("p", format!("must be in [1, inf] (got {p})")));
    }
    let l = f.lattice();
    if p.is_infinite() {
        return Ok(par::max_range(l.len(), |i| f.abs2_at(i).sqrt()));
    }
    if p == 2.0 {
        return Ok(l2_norm(f));
    }
    let s = par::sum_range(l.len(), |i| f.abs2_at(i).sqrt().powf(p));
    Ok((l.cell_volume() * s).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{ComplexField, Lattice, ScalarField, SpinorField};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn sobolev_examples() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let vol = (2.0 * PI).powf(1.5);
        let one = ScalarField::constant(&l, 1.0);
        assert!((sobolev_norm(&one, 0.0, false).unwrap() - vol).abs() < 1e-12);
        let e1 = ComplexField::from_fn(&l, |x| [Complex64::from_polar(1.0, x[0])]);
        let h1 = sobolev_norm(&e1, 1.0, false).unwrap();
        assert!((h1 - 2f64.sqrt() * vol).abs() < 1e-12);
        assert_eq!(sobolev_norm(&one, 1.0, true).unwrap(), 0.0);
        assert!(sobolev_norm(&one, -1.0, true).is_err());
        let s = ScalarField::from_fn(&l, |x| [x[1].sin()]);
        assert!(sobolev_norm(&s, -1.0, true).is_ok());
    }

    #[test]
    fn lp_examples() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let vol = (2.0 * PI).powf(1.5);
        let one = ScalarField::constant(&l, 1.0);
        assert!((lp_norm(&one, 2.0).unwrap() - vol).abs() < 1e-12);
        let z = SpinorField::zeros(&l);
        for p in [1.0, 1.5, 3.0, f64::INFINITY] {
            assert_eq!(lp_norm(&z, p).unwrap(), 0.0);
        }
        assert!(lp_norm(&one, 0.5).is_err());
        let fine = Lattice::new(64, 2.0 * PI).unwrap();
        let s = ScalarField::from_fn(&fine, |x| [x[0].sin().abs()]);
        assert!((lp_norm(&s, f64::INFINITY).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn parseval() {
        let l = Lattice::new(8, 3.0).unwrap();
        let f = SpinorField::from_index_fn(&l, |i| {
            let t = i as f64;
            [
                Complex64::new((0.3 * t).sin(), 0.1),
                Complex64::new(0.0, (1.7 * t).cos()),
                Complex64::new(0.2 * (t * 0.01).exp(), 0.0),
                Complex64::new(-1.0, 0.5),
            ]
        });
        let a = l2_norm(&f);
        let b = sobolev_norm(&f, 0.0, false).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }
}
