//! Hot kernels on one thread versus the full pool. Built without the
//! `parallel` feature, only the sequential variants run.

use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nrlimit_core::dm::{dm_strang_step, free_dirac_step, DmState, StepConfig};
use nrlimit_core::fourier::{Lattice, SpinorField, VectorField};
use nrlimit_core::verify::random;

fn state(n: usize) -> DmState {
    let l = Lattice::new(n, 2.0 * PI).unwrap();
    let mut rng = random::rng(1);
    let psi: SpinorField = random::smooth_field(&l, 2.0, &mut rng);
    let a = random::divergence_free(&l, 2.0, &mut rng);
    DmState::new(psi, a, VectorField::zeros(&l), 0.25).unwrap()
}

#[cfg(feature = "parallel")]
fn pools() -> Vec<(String, Option<rayon::ThreadPool>)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    vec![
        ("1-thread".to_string(), Some(one)),
        (format!("{}-threads", rayon::current_num_threads()), None),
    ]
}

#[cfg(not(feature = "parallel"))]
fn pools() -> Vec<(String, Option<()>)> {
    vec![("sequential".to_string(), None)]
}

#[cfg(feature = "parallel")]
fn within<T: Send>(pool: &Option<rayon::ThreadPool>, f: impl FnOnce() -> T + Send) -> T {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn within<T>(_: &Option<()>, f: impl FnOnce() -> T) -> T {
    f()
}

fn kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernels");
    g.sample_size(10);
    for n in [16, 32] {
        let s = state(n);
        let cfg = StepConfig::new(1e-3);
        for (label, pool) in pools() {
            g.bench_with_input(BenchmarkId::new(format!("spinor_fft/{label}"), n), &s, |b, s| {
                b.iter(|| within(&pool, || black_box(s.psi.spectra()[0][1])))
            });
            g.bench_with_input(BenchmarkId::new(format!("free_dirac_step/{label}"), n), &s, |b, s| {
                b.iter(|| within(&pool, || black_box(free_dirac_step(&s.psi, 1e-3, s.eps).unwrap())))
            });
            g.bench_with_input(BenchmarkId::new(format!("dm_strang_step/{label}"), n), &s, |b, s| {
                b.iter(|| within(&pool, || black_box(dm_strang_step(s, &cfg).unwrap())))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
