//! Null bilinear forms and the two null-structure identities of the
//! Coulomb-gauge coupling.

use num_complex::Complex64;

use crate::dm::{build_u, compute_eb, free_dirac_step, step_count, DIVERGENCE_TOLERANCE};
use crate::error::{Error, Result};
use crate::fourier::symbol::norm2;
use crate::fourier::{
    self, check_same, l2_norm, CField, ComplexField, ScalarField, SpinorField,
    VectorField,
};
use crate::spinor::{alpha_mul, dirac_symbol_mul, spin_mul};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A field together with its time derivative `∂₀f = ε∂ₜf`, when known.
#[derive(Clone, Debug)]
pub struct Jet<const C: usize> {
    pub value: CField<C>,
    pub eps_dt: Option<CField<C>>,
}

impl<const C: usize> Jet<C> {
    pub fn new(value: CField<C>, eps_dt: CField<C>) -> Result<Self> {
        check_same(value.lattice(), eps_dt.lattice())?;
        Ok(Self {
            value,
            eps_dt: Some(eps_dt),
        })
    }

    /// A jet without time derivative; only spatial forms can use it.
    pub fn spatial(value: CField<C>) -> Self {
        Self {
            value,
            eps_dt: None,
        }
    }

    /// `∂_μ f`, with `μ = 0` the time direction.
    pub fn derivative(&self, mu: usize) -> Result<CField<C>> {
        match mu {
            0 => self
                .eps_dt
                .clone()
                .ok_or(Error::MissingTimeDerivative("null form argument lacks eps*dt")),
            1..=3 => Ok(fourier::partial(&self.value, mu - 1)),
            _ => Err(crate::error::invalid("mu", format!("index {mu} outside 0..=3"))),
        }
    }

    /// Apply the same pointwise linear map to the value and its derivative.
    pub fn map<const D: usize, F>(&self, f: F) -> Jet<D>
    where
        F: Fn([Complex64; C]) -> [Complex64; D] + Sync,
    {
        Jet {
            value: self.value.map_points(|_, v| f(v)),
            eps_dt: self.eps_dt.as_ref().map(|d| d.map_points(|_, v| f(v))),
        }
    }
}

/// Scalar jet from a real field and its real `ε∂ₜ`.
fn scalar_jet(f: &[f64], dt: Option<&[f64]>, lattice: &crate::fourier::Lattice) -> Jet<1> {
    let c = |x: &[f64]| ComplexField::from_index_fn(lattice, |i| [Complex64::new(x[i], 0.0)]);
    Jet {
        value: c(f),
        eps_dt: dt.map(c),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NullKind {
    /// `Q₀(u,v) = ∂₀u∂₀v − ∇u·∇v`.
    Q0,
    /// `Q_{αβ}(u,v) = ∂_αu∂_βv − ∂_βu∂_αv`, indices in `0..=3`.
    Q(usize, usize),
}

/// Pointwise `Σ_terms sign·a·b` for scalar `a` and `C`-component `b`.
fn products<const C: usize>(terms: &[(f64, &ComplexField, &CField<C>)]) -> CField<C> {
    let l = terms[0].2.lattice();
    CField::<C>::from_index_fn(l, |i| {
        let mut out = [ZERO; C];
        for (s, a, b) in terms {
            let av = a.comp(0)[i] * *s;
            let bv = b.at(i);
            for c in 0..C {
                out[c] += av * bv[c];
            }
        }
        out
    })
}

/// Evaluate a null form of the scalar `u` against the `C`-component `v`.
pub fn null_form<const C: usize>(u: &Jet<1>, v: &Jet<C>, kind: NullKind) -> Result<CField<C>> {
    check_same(u.value.lattice(), v.value.lattice())?;
    match kind {
        NullKind::Q0 => {
            let du: Vec<ComplexField> = (0..4).map(|m| u.derivative(m)).collect::<Result<_>>()?;
            let dv: Vec<CField<C>> = (0..4).map(|m| v.derivative(m)).collect::<Result<_>>()?;
            Ok(products(&[
                (1.0, &du[0], &dv[0]),
                (-1.0, &du[1], &dv[1]),
                (-1.0, &du[2], &dv[2]),
                (-1.0, &du[3], &dv[3]),
            ]))
        }
        NullKind::Q(a, b) => {
            if a == b {
                u.derivative(a)?;
                return Ok(CField::zeros(u.value.lattice()));
            }
            let (ua, ub) = (u.derivative(a)?, u.derivative(b)?);
            let (va, vb) = (v.derivative(a)?, v.derivative(b)?);
            Ok(products(&[(1.0, &ua, &vb), (-1.0, &ub, &va)]))
        }
    }
}

/// `b^{jk} = |∇|⁻¹(R_jf_k − R_kf_j)`, i.e. symbol `(iξ_jf̂_k − iξ_kf̂_j)/|ξ|²`.
fn riesz_pair(f: &VectorField, j: usize, k: usize) -> ComplexField {
    f.to_complex().map_modes(|_, xi, v| {
        let r = norm2(xi);
        if r == 0.0 {
            [ZERO]
        } else {
            [I * (xi[j] * v[k] - xi[k] * v[j]) / r]
        }
    })
}

/// The identities hold for divergence-free potentials without a constant
/// part: on the torus a uniform `A` has no Riesz representation.
fn check_potential(name: &'static str, f: &VectorField) -> Result<()> {
    let d = fourier::divergence_defect(f);
    if d > DIVERGENCE_TOLERANCE {
        return Err(crate::error::invalid(
            name,
            format!("must be divergence free (spectral defect {d:.3e})"),
        ));
    }
    let mean = f.spectra().iter().map(|c| c[0].norm()).fold(0.0, f64::max);
    if mean > DIVERGENCE_TOLERANCE {
        return Err(crate::error::invalid(name, format!("must have zero mean (got {mean:.3e})")));
    }
    Ok(())
}

fn relative(lhs: &SpinorField, rhs: &SpinorField) -> f64 {
    let diff = l2_norm(&(lhs - rhs));
    let scale = l2_norm(lhs).max(l2_norm(rhs));
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Both sides of `2A·∇ψ = −Q_{jk}(|∇|⁻¹a^{jk}, ψ)` (summed over all `j, k`).
pub fn null_identity_one_sides(a: &VectorField, psi: &SpinorField) -> Result<(SpinorField, SpinorField)> {
    check_same(a.lattice(), psi.lattice())?;
    check_potential("A", a)?;
    let grad = fourier::spinor_gradient(psi);
    let lhs = SpinorField::from_index_fn(psi.lattice(), |i| {
        let av = a.at(i);
        std::array::from_fn(|c| {
            2.0 * (av[0] * grad[0].comp(c)[i] + av[1] * grad[1].comp(c)[i] + av[2] * grad[2].comp(c)[i])
        })
    });
    let pj = Jet::spatial(psi.clone());
    let mut rhs = SpinorField::zeros(psi.lattice());
    for j in 0..3 {
        for k in 0..3 {
            if j == k {
                continue;
            }
            let b = Jet::spatial(riesz_pair(a, j, k));
            rhs = &rhs - &null_form(&b, &pj, NullKind::Q(j + 1, k + 1))?;
        }
    }
    Ok((lhs, rhs))
}

/// Both sides of the second identity, with `ψ` supplied separately from
/// `U`. The left side is `{i(E_j − ∂_jA₀)α^j − B_jS^j}ψ`; the right side is
///
/// `Q_{jk}(|∇|⁻¹ε∂ₜa^{jk}, U) − Q_{jk}(|∇|⁻¹∂_la^{jk}, α^lU) + Q₀(A_j, α^jU)
///  + Q_{0j}(A_k, α^jα^kU) − ½i Q_{jk}(A_m, ε^{jkl}S_lα^mU)`.
pub fn null_identity_two_sides(
    a0: &ScalarField,
    a: &VectorField,
    eps_dt_a: &VectorField,
    psi: &SpinorField,
    u: &Jet<4>,
) -> Result<(SpinorField, SpinorField)> {
    let l = psi.lattice();
    for f in [a.lattice(), eps_dt_a.lattice(), a0.lattice(), u.value.lattice()] {
        check_same(l, f)?;
    }
    check_potential("A", a)?;
    check_potential("eps_dt_A", eps_dt_a)?;
    if u.eps_dt.is_none() {
        return Err(Error::MissingTimeDerivative("U lacks eps*dt(U)"));
    }

    let (e, b) = compute_eb(a0, a, eps_dt_a)?;
    let grad_a0 = fourier::gradient(a0);
    let lhs = SpinorField::from_index_fn(l, |i| {
        let v = psi.at(i);
        let (ei, gi, bi) = (e.at(i), grad_a0.at(i), b.at(i));
        let mut out = [ZERO; 4];
        for j in 0..3 {
            let av = alpha_mul(j, v);
            let sv = spin_mul(j, v);
            for c in 0..4 {
                out[c] += I * (ei[j] - gi[j]) * av[c] - bi[j] * sv[c];
            }
        }
        out
    });

    let mut rhs = SpinorField::zeros(l);
    let add = |rhs: &mut SpinorField, f: SpinorField, k: Complex64| {
        *rhs = &*rhs + &f.scale(k);
    };
    let one = Complex64::new(1.0, 0.0);
    let a_jets: Vec<Jet<1>> = (0..3)
        .map(|j| scalar_jet(a.comp(j), Some(eps_dt_a.comp(j)), l))
        .collect();
    let alpha_u: Vec<Jet<4>> = (0..3).map(|j| u.map(|v| alpha_mul(j, v))).collect();

    for j in 0..3 {
        for k in 0..3 {
            if j == k {
                continue;
            }
            let qjk = NullKind::Q(j + 1, k + 1);
            let b_dt = Jet::spatial(riesz_pair(eps_dt_a, j, k));
            add(&mut rhs, null_form(&b_dt, u, qjk)?, one);
            let b = riesz_pair(a, j, k);
            for (m, au) in alpha_u.iter().enumerate() {
                let db = Jet::spatial(fourier::partial(&b, m));
                add(&mut rhs, null_form(&db, au, qjk)?, -one);
            }
        }
    }
    for (j, aj) in a_jets.iter().enumerate() {
        add(&mut rhs, null_form(aj, &alpha_u[j], NullKind::Q0)?, one);
    }
    for j in 0..3 {
        for (k, ak) in a_jets.iter().enumerate() {
            let w = alpha_u[k].map(|v| alpha_mul(j, v));
            add(&mut rhs, null_form(ak, &w, NullKind::Q(0, j + 1))?, one);
        }
    }
    for j in 0..3 {
        for k in 0..3 {
            if j == k {
                continue;
            }
            let lidx = 3 - j - k;
            let sign = if (k + 3 - j) % 3 == 1 { 1.0 } else { -1.0 };
            for (m, am) in a_jets.iter().enumerate() {
                let w = alpha_u[m].map(|v| spin_mul(lidx, v));
                let q = null_form(am, &w, NullKind::Q(j + 1, k + 1))?;
                add(&mut rhs, q, Complex64::new(0.0, -0.5 * sign));
            }
        }
    }
    Ok((lhs, rhs))
}

/// Relative residuals of both identities after restricting every input to
/// the 2/3 band. `u` carries `U` and `ε∂ₜU`.
pub fn null_identity_check(
    a0: &ScalarField,
    a: &VectorField,
    eps_dt_a: &VectorField,
    psi: &SpinorField,
    u: &Jet<4>,
) -> Result<(f64, f64)> {
    let a0 = a0.dealiased();
    let a = a.dealiased();
    let eps_dt_a = eps_dt_a.dealiased();
    let psi = psi.dealiased();
    let u = Jet {
        value: u.value.dealiased(),
        eps_dt: u.eps_dt.as_ref().map(|d| d.dealiased()),
    };
    let (l1, r1) = null_identity_one_sides(&a, &psi)?;
    let (l2, r2) = null_identity_two_sides(&a0, &a, &eps_dt_a, &psi, &u)?;
    Ok((relative(&l1, &r1), relative(&l2, &r2)))
}

/// `ψ = i∂₋U = i(ε∂ₜU − α^j∂_jU)`, the spinor a given jet of `U` represents.
pub fn spinor_from_u(u: &Jet<4>) -> Result<SpinorField> {
    let dt = u.derivative(0)?;
    let grad = fourier::spinor_gradient(&u.value);
    Ok(SpinorField::from_index_fn(u.value.lattice(), |i| {
        let d = dt.at(i);
        let mut out = d;
        for (j, g) in grad.iter().enumerate() {
            let ag = alpha_mul(j, g.at(i));
            for c in 0..4 {
                out[c] -= ag[c];
            }
        }
        out.map(|z| I * z)
    }))
}

/// Residual of the second identity at `t_final` along the free Dirac flow
/// from `psi0`, with `U` from [`build_u`] at step `dt` and `ε∂ₜψ = −iε⁻¹𝒬ψ`
/// evaluated exactly. The potentials are held fixed; the identity is
/// pointwise in time, so only `U`'s accuracy enters.
pub fn free_dirac_u_residual(
    psi0: &SpinorField,
    eps: f64,
    t_final: f64,
    dt: f64,
    a: &VectorField,
    eps_dt_a: &VectorField,
) -> Result<f64> {
    let steps = step_count(t_final, dt)?;
    let h = t_final / steps as f64;
    let mut psi = vec![psi0.dealiased()];
    for k in 0..steps {
        psi.push(free_dirac_step(&psi[k], h, eps)?);
    }
    let eps_dt: Vec<SpinorField> = psi
        .iter()
        .map(|p| p.map_modes(|_, xi, v| dirac_symbol_mul(eps, xi, v).map(|z| -I * z / eps)))
        .collect();
    let traj = build_u(&psi, &eps_dt, h, eps)?;
    let u = Jet::new(traj.u[steps].clone(), traj.eps_dt_u[steps].clone())?;
    let a0 = ScalarField::zeros(psi0.lattice());
    Ok(null_identity_check(&a0, a, eps_dt_a, &psi[steps], &u)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Lattice;
    use std::f64::consts::PI;

    #[test]
    fn q12_of_sines() {
        let l = Lattice::new(8, 2.0 * PI).unwrap();
        let u = Jet::spatial(ComplexField::from_fn(&l, |x| [Complex64::new(x[0].sin(), 0.0)]));
        let v = Jet::spatial(ComplexField::from_fn(&l, |x| [Complex64::new(x[1].sin(), 0.0)]));
        let q = null_form(&u, &v, NullKind::Q(1, 2)).unwrap();
        let want = ComplexField::from_fn(&l, |x| [Complex64::new(x[0].cos() * x[1].cos(), 0.0)]);
        assert!(q.max_abs_diff(&want) < 1e-13);
        assert!(null_form(&u, &u, NullKind::Q(1, 2)).unwrap().max_abs_diff(&ComplexField::zeros(&l)) < 1e-15);
    }

    #[test]
    fn time_forms_need_time_derivatives() {
        let l = Lattice::new(4, 2.0 * PI).unwrap();
        let u = Jet::spatial(ComplexField::zeros(&l));
        assert!(matches!(
            null_form(&u, &u, NullKind::Q0),
            Err(Error::MissingTimeDerivative(_))
        ));
        assert!(null_form(&u, &u, NullKind::Q(1, 3)).is_ok());
    }

    #[test]
    fn constants_give_zero() {
        let l = Lattice::new(4, 2.0 * PI).unwrap();
        let c = ComplexField::from_fn(&l, |_| [Complex64::new(0.3, -1.0)]);
        let u = Jet::new(c.clone(), ComplexField::zeros(&l)).unwrap();
        for kind in [NullKind::Q0, NullKind::Q(0, 1), NullKind::Q(2, 3)] {
            assert!(null_form(&u, &u, kind).unwrap().max_abs_diff(&ComplexField::zeros(&l)) < 1e-15);
        }
    }
}
