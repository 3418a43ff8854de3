use num_complex::Complex64;

use super::matrices::{inner, sigma_mul};
use super::projection::check_eps;
use crate::error::Result;
use crate::fourier::{self, check_same, CField, GridField, ScalarField, SpinorField, TwoSpinorField, VectorField};
use crate::par;

/// `ρ = ⟨ψ, ψ⟩` pointwise.
pub fn charge_density<const C: usize>(psi: &CField<C>) -> ScalarField {
    ScalarField::from_index_fn(psi.lattice(), |i| [psi.abs2_at(i)])
}

/// `J_k = ε⁻¹⟨α^kψ, ψ⟩ = 2ε⁻¹ Re⟨σ^kχ, η⟩`.
pub fn current_density(psi: &SpinorField, eps: f64) -> Result<VectorField> {
    check_eps(eps)?;
    Ok(VectorField::from_index_fn(psi.lattice(), |i| {
        let v = psi.at(i);
        let chi = [v[0], v[1]];
        let eta = [v[2], v[3]];
        std::array::from_fn(|k| 2.0 * inner(&sigma_mul(k, chi), &eta).re / eps)
    }))
}

/// Spin density `⟨σ^j v, v⟩` (real).
pub fn spin_density(v: &TwoSpinorField) -> VectorField {
    VectorField::from_index_fn(v.lattice(), |i| {
        let w = v.at(i);
        std::array::from_fn(|j| inner(&sigma_mul(j, w), &w).re)
    })
}

/// `Im⟨∂_j v, v⟩` per component.
fn momentum_density(v: &TwoSpinorField) -> VectorField {
    let g = fourier::spinor_gradient(v);
    VectorField::from_index_fn(v.lattice(), |i| {
        let w = v.at(i);
        std::array::from_fn(|j| inner(&g[j].at(i), &w).im)
    })
}

/// Limit current
/// `J⁰ = Im⟨∇v₊,v₊⟩ − Im⟨∇v₋,v₋⟩ + ½∇×⟨σv₊,v₊⟩ − ½∇×⟨σv₋,v₋⟩`.
pub fn limit_current(v_plus: &TwoSpinorField, v_minus: &TwoSpinorField) -> Result<VectorField> {
    check_same(v_plus.lattice(), v_minus.lattice())?;
    let p = &momentum_density(v_plus) - &momentum_density(v_minus);
    let s = &spin_density(v_plus) - &spin_density(v_minus);
    Ok(&p + &(&fourier::curl(&s) * 0.5))
}

/// Pauli current `J_P = Im⟨(∇ − iεA)χ, χ⟩ = Im⟨∇χ,χ⟩ − ε|χ|²A`.
pub fn pauli_current(chi: &TwoSpinorField, a: &VectorField, eps: f64) -> Result<VectorField> {
    check_same(chi.lattice(), a.lattice())?;
    if !(eps >= 0.0) {
        return Err(crate::error::invalid("eps", format!("must be non-negative (got {eps})")));
    }
    let p = momentum_density(chi);
    Ok(p.map_points(|i, v| {
        let n = chi.abs2_at(i);
        let ai = a.at(i);
        std::array::from_fn(|j| v[j] - eps * n * ai[j])
    }))
}

/// `∫⟨ψ, ψ⟩ dx`.
pub fn total_charge<F: GridField + ?Sized>(psi: &F) -> f64 {
    let l = psi.lattice();
    l.cell_volume() * par::sum_range(l.len(), |i| psi.abs2_at(i))
}

/// Charge and current densities written in terms of the modulated fields
/// `φ± = (χ±, η±)`, with `ψ = e^{−it/ε²}φ₊ + e^{it/ε²}φ₋`:
///
/// `ρ = |χ₊|² + |χ₋|² + |η₊|² + |η₋|² + 2Re{e^{−2it/ε²}(⟨χ₊,χ₋⟩ + ⟨η₊,η₋⟩)}`,
/// `J_j = 2ε⁻¹Re{⟨σ^jχ₊,η₊⟩ + ⟨σ^jχ₋,η₋⟩ + e^{2it/ε²}⟨σ^jχ₋,η₊⟩ + e^{−2it/ε²}⟨σ^jχ₊,η₋⟩}`.
pub fn density_expansions(
    phi_plus: &SpinorField,
    phi_minus: &SpinorField,
    t: f64,
    eps: f64,
) -> Result<(ScalarField, VectorField)> {
    check_eps(eps)?;
    check_same(phi_plus.lattice(), phi_minus.lattice())?;
    let l = phi_plus.lattice();
    let e = Complex64::from_polar(1.0, -2.0 * t / (eps * eps));
    let vals = par::map_range(l.len(), |i| {
        let p = phi_plus.at(i);
        let m = phi_minus.at(i);
        let (cp, ep) = ([p[0], p[1]], [p[2], p[3]]);
        let (cm, em) = ([m[0], m[1]], [m[2], m[3]]);
        let rho = inner(&cp, &cp).re
            + inner(&cm, &cm).re
            + inner(&ep, &ep).re
            + inner(&em, &em).re
            + 2.0 * (e * (inner(&cp, &cm) + inner(&ep, &em))).re;
        let j: [f64; 3] = std::array::from_fn(|k| {
            let z = inner(&sigma_mul(k, cp), &ep)
                + inner(&sigma_mul(k, cm), &em)
                + e.conj() * inner(&sigma_mul(k, cm), &ep)
                + e * inner(&sigma_mul(k, cp), &em);
            2.0 * z.re / eps
        });
        (rho, j)
    });
    let rho = ScalarField::from_index_fn(l, |i| [vals[i].0]);
    let j = VectorField::from_index_fn(l, |i| vals[i].1);
    Ok((rho, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Lattice;
    use std::f64::consts::PI;

    const Z: Complex64 = Complex64::new(0.0, 0.0);

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn charge_examples() {
        let l = Lattice::new(4, 2.0 * PI).unwrap();
        let up = SpinorField::from_fn(&l, |_| [c(1.0, 0.0), Z, Z, Z]);
        assert!(charge_density(&up).max_abs_diff(&ScalarField::constant(&l, 1.0)) < 1e-15);
        assert!((total_charge(&up) - (2.0 * PI).powi(3)).abs() < 1e-10);
        let s = 0.5f64.sqrt();
        let mix = SpinorField::from_fn(&l, |_| [c(s, 0.0), c(0.0, s), Z, Z]);
        assert!(charge_density(&mix).max_abs_diff(&ScalarField::constant(&l, 1.0)) < 1e-15);
        assert_eq!(total_charge(&SpinorField::zeros(&l)), 0.0);
    }

    #[test]
    fn current_examples() {
        let l = Lattice::new(4, 2.0 * PI).unwrap();
        let up = SpinorField::from_fn(&l, |_| [c(1.0, 0.0), Z, Z, Z]);
        assert!(current_density(&up, 1.0).unwrap().max_abs_diff(&VectorField::zeros(&l)) < 1e-15);
        let s = 0.5f64.sqrt();
        let psi = SpinorField::from_fn(&l, |_| [c(s, 0.0), Z, c(s, 0.0), Z]);
        let j = current_density(&psi, 1.0).unwrap();
        assert!(j.max_abs_diff(&VectorField::constant(&l, [0.0, 0.0, 1.0])) < 1e-15);
        let j2 = current_density(&psi, 0.5).unwrap();
        assert!(j2.max_abs_diff(&(&j * 2.0)) < 1e-15);
    }

    #[test]
    fn limit_current_examples() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let zero = TwoSpinorField::zeros(&l);
        let konst = TwoSpinorField::from_fn(&l, |_| [c(0.3, 1.0), c(-2.0, 0.5)]);
        let j = limit_current(&konst, &zero).unwrap();
        assert!(j.max_abs_diff(&VectorField::zeros(&l)) < 1e-13);
        let w = TwoSpinorField::from_fn(&l, |x| [Complex64::from_polar(1.0, x[0]), Z]);
        let j = limit_current(&w, &zero).unwrap();
        assert!(j.max_abs_diff(&VectorField::constant(&l, [1.0, 0.0, 0.0])) < 1e-13);
        let v = TwoSpinorField::from_fn(&l, |x| [c(x[1].sin(), 0.2), c(0.0, x[2].cos())]);
        let a = limit_current(&v, &zero).unwrap();
        let b = limit_current(&zero, &v).unwrap();
        assert!(b.max_abs_diff(&-&a) < 1e-13);
    }

    #[test]
    fn pauli_current_examples() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let konst = TwoSpinorField::from_fn(&l, |_| [c(0.3, 1.0), c(-2.0, 0.5)]);
        let z = VectorField::zeros(&l);
        assert!(pauli_current(&konst, &z, 0.5).unwrap().max_abs_diff(&z) < 1e-13);
        let w = TwoSpinorField::from_fn(&l, |x| [Z, Complex64::from_polar(1.0, x[1])]);
        let j = pauli_current(&w, &z, 0.5).unwrap();
        assert!(j.max_abs_diff(&VectorField::constant(&l, [0.0, 1.0, 0.0])) < 1e-13);
        let a = [0.5, -1.0, 2.0];
        let n2 = 0.09 + 1.0 + 4.0 + 0.25;
        let eps = 0.25;
        let j = pauli_current(&konst, &VectorField::constant(&l, a), eps).unwrap();
        let want = VectorField::constant(&l, a.map(|x| -eps * n2 * x));
        assert!(j.max_abs_diff(&want) < 1e-12);
    }
}
