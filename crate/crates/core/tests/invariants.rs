//! Property tests for structural invariants.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use nrlimit_core::dm::{dm_strang_step, free_dirac_step, DmState, StepConfig};
use nrlimit_core::fourier::symbol::{h_symbol, lambda_symbol, norm2};
use nrlimit_core::fourier::{divergence_defect, l2_norm, leray_project, ComplexField, Lattice, SpinorField, VectorField};
use nrlimit_core::limit::{pauli_step, PauliState};
use nrlimit_core::spinor::{pi_eps, total_charge, Branch};
use nrlimit_core::verify::null::{null_form, Jet, NullKind};
use nrlimit_core::verify::probe::{localized_data, probe_ratio, ProbeCase};
use nrlimit_core::verify::random;
use nrlimit_core::verify::rates::fit_rate;
use nrlimit_core::Complex64;

fn lattice() -> Lattice {
    Lattice::new(8, 2.0 * PI).unwrap()
}

fn jet<const C: usize>(l: &Lattice, seed: u64) -> Jet<C> {
    let mut rng = random::rng(seed);
    let v = random::smooth_field(l, 1.5, &mut rng);
    let d = random::smooth_field(l, 1.5, &mut rng);
    Jet::new(v, d).unwrap()
}

fn rel(a: &SpinorField, b: &SpinorField) -> f64 {
    l2_norm(&(a - b)) / l2_norm(a).max(l2_norm(b)).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn null_forms_are_antisymmetric(seed in any::<u64>(), a in 0usize..4, b in 0usize..4) {
        let l = lattice();
        let u: Jet<1> = jet(&l, seed);
        let v: Jet<4> = jet(&l, seed.wrapping_add(1));
        let q_ab = null_form(&u, &v, NullKind::Q(a, b)).unwrap();
        let q_ba = null_form(&u, &v, NullKind::Q(b, a)).unwrap();
        prop_assert!(l2_norm(&(&q_ab + &q_ba)) <= 1e-12 * l2_norm(&q_ab).max(1.0));
    }

    #[test]
    fn null_forms_are_bilinear(seed in any::<u64>(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let l = lattice();
        let c = Complex64::new(re, im);
        let u: Jet<1> = jet(&l, seed);
        let v1: Jet<4> = jet(&l, seed ^ 0x55);
        let v2: Jet<4> = jet(&l, seed ^ 0xaa);
        let comb = Jet::new(
            &v1.value.scale(c) + &v2.value,
            &v1.eps_dt.clone().unwrap().scale(c) + v2.eps_dt.as_ref().unwrap(),
        )
        .unwrap();
        for kind in [NullKind::Q0, NullKind::Q(0, 2), NullKind::Q(1, 3)] {
            let lhs = null_form(&u, &comb, kind).unwrap();
            let rhs = &null_form(&u, &v1, kind).unwrap().scale(c) + &null_form(&u, &v2, kind).unwrap();
            prop_assert!(rel(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn projections_are_complete(seed in any::<u64>(), eps in 0.05..1.0f64) {
        let l = lattice();
        let psi: SpinorField = random::smooth_field(&l, 2.0, &mut random::rng(seed));
        let p = pi_eps(&psi, eps, Branch::Plus).unwrap();
        let m = pi_eps(&psi, eps, Branch::Minus).unwrap();
        prop_assert!(rel(&(&p + &m), &psi) < 1e-13);
        let pp = pi_eps(&p, eps, Branch::Plus).unwrap();
        prop_assert!(rel(&pp, &p) < 1e-13);
    }

    #[test]
    fn symbol_bounds_hold_pointwise(x in -50.0..50.0f64, y in -50.0..50.0f64, z in -50.0..50.0f64, eps in 0.01..1.0f64) {
        let xi = [x, y, z];
        let k = norm2(xi).sqrt();
        let v = 1.0 - 1.0 / lambda_symbol(eps, xi);
        prop_assert!(v >= -1e-14);
        prop_assert!(v <= 1.0_f64.min(eps * k).min(eps * eps * k * k) * (1.0 + 1e-12));
        let d = k / eps - h_symbol(eps, xi);
        prop_assert!(d >= -1e-12 * (k / eps).max(1.0));
        prop_assert!(d <= (1.0 + 1e-12) / (eps * eps));
    }

    #[test]
    fn free_flow_is_unitary_and_a_group(seed in any::<u64>(), eps in 0.1..1.0f64, t1 in 0.0..0.5f64, t2 in 0.0..0.5f64) {
        let l = lattice();
        let psi: SpinorField = random::smooth_field(&l, 2.0, &mut random::rng(seed));
        let a = free_dirac_step(&free_dirac_step(&psi, t1, eps).unwrap(), t2, eps).unwrap();
        let b = free_dirac_step(&psi, t1 + t2, eps).unwrap();
        prop_assert!(rel(&a, &b) < 1e-12);
        assert_relative_eq!(total_charge(&b), total_charge(&psi), max_relative = 1e-12);
    }

    #[test]
    fn pauli_step_conserves_charge(seed in any::<u64>(), eps in 0.1..1.0f64, dt in 1e-3..0.1f64) {
        let l = lattice();
        let mut rng = random::rng(seed);
        let chi = random::smooth_field(&l, 2.0, &mut rng);
        let a = random::divergence_free(&l, 1.5, &mut rng);
        let a0 = random::smooth_field::<1, _>(&l, 1.5, &mut rng).real_part();
        let s = PauliState::new(chi, eps).unwrap();
        let next = pauli_step(&s, &a0, &a, None, dt).unwrap();
        assert_relative_eq!(total_charge(&next.chi), total_charge(&s.chi), max_relative = 1e-12);
    }

    #[test]
    fn leray_projection_is_idempotent(seed in any::<u64>()) {
        let l = lattice();
        let u: VectorField = random::smooth_field::<3, _>(&l, 2.0, &mut random::rng(seed)).real_part();
        let p = leray_project(&u);
        prop_assert!(divergence_defect(&p) < 1e-12);
        let pp = leray_project(&p);
        prop_assert!(l2_norm(&(&pp - &p)) < 1e-13 * l2_norm(&p).max(1.0));
    }

    #[test]
    fn probe_ratio_is_scale_invariant(seed in any::<u64>(), c in 0.01..100.0f64) {
        let l = Lattice::new(16, 2.0 * PI).unwrap();
        let mut rng = random::rng(seed);
        let f = localized_data(&l, 1.0, &mut rng);
        let g = localized_data(&l, 1.0, &mut rng);
        let r = probe_ratio(ProbeCase::Off, &f, &g, 1.0, 1.0, 0.5, 0.5).unwrap();
        let cf: ComplexField = f.scale(Complex64::new(0.0, c));
        let rc = probe_ratio(ProbeCase::Off, &cf, &g, 1.0, 1.0, 0.5, 0.5).unwrap();
        assert_relative_eq!(r, rc, max_relative = 1e-12);
    }

    #[test]
    fn fitted_rate_ignores_constants(c in 1e-6..1e6f64, p in 0.2..3.0f64) {
        let eps = [0.4, 0.2, 0.1, 0.05];
        let err: Vec<f64> = eps.iter().map(|e: &f64| c * e.powf(p)).collect();
        let f = fit_rate(&eps, &err).unwrap();
        assert_relative_eq!(f.rate.value().unwrap(), p, epsilon = 1e-10);
    }
}

#[test]
fn coupled_step_is_deterministic() {
    let l = lattice();
    let mut rng = random::rng(7);
    let psi: SpinorField = random::smooth_field(&l, 1.5, &mut rng);
    let a = random::divergence_free(&l, 1.5, &mut rng);
    let s = DmState::new(psi, a, VectorField::zeros(&l), 0.3).unwrap();
    let cfg = StepConfig::new(0.01);
    let x = dm_strang_step(&s, &cfg).unwrap();
    let y = dm_strang_step(&s, &cfg).unwrap();
    for c in 0..4 {
        let same = x.psi.comp(c).iter().zip(y.psi.comp(c)).all(|(p, q)| p.re.to_bits() == q.re.to_bits() && p.im.to_bits() == q.im.to_bits());
        assert!(same);
    }
}
