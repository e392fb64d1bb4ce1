use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kaczlab_core::testbed::{five_atom, random_coefficients, random_unit_vector, three_atom};
use kaczlab_core::truncation::recommended_cycles;
use kaczlab_core::{
    abel_sweep, cycle_operator_norm, kaczmarz_run, moore_penrose_lss, periodize, series_reconstruction,
    truncated_noisy_run, InputStream, MomentSource,
};

fn iteration_vs_series(c: &mut Criterion) {
    let m = five_atom();
    let x = random_unit_vector(&m, 1);
    let mut group = c.benchmark_group("kaczmarz");
    for n in [1_000, 10_000] {
        let data = InputStream::clean(&m, &x, n).unwrap();
        let alpha = MomentSource::Atomic(m.clone()).alpha_coefficients(n).unwrap();
        group.bench_with_input(BenchmarkId::new("iteration", n), &n, |b, &n| {
            b.iter(|| kaczmarz_run(&m, black_box(&data), n, false, None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("series", n), &n, |b, &n| {
            b.iter(|| series_reconstruction(&m, &alpha, black_box(&data), n).unwrap())
        });
    }
    group.finish();
}

fn abel(c: &mut Criterion) {
    let m = three_atom();
    let depth = 100_000;
    let data = InputStream::raw(random_coefficients(depth + 1, 2));
    let alpha = MomentSource::Atomic(m.clone()).alpha_coefficients(depth).unwrap();
    c.bench_function("abel_sweep/three_atom/1e5", |b| {
        b.iter(|| abel_sweep(&m, &alpha, black_box(&data), &[0.9, 0.99, 0.999], 1e-12, None).unwrap())
    });
}

fn truncation(c: &mut Criterion) {
    let m = five_atom();
    let sys = periodize(&m, 8).unwrap();
    let x = random_unit_vector(&m, 3);
    let eps = random_coefficients(8, 4);
    let cycles = recommended_cycles(cycle_operator_norm(&sys));
    c.bench_function("truncation/noisy_run", |b| {
        b.iter(|| truncated_noisy_run(&sys, &x, black_box(&eps), cycles).unwrap())
    });
    c.bench_function("truncation/least_squares", |b| {
        b.iter(|| moore_penrose_lss(&sys, black_box(&eps)).unwrap())
    });
}

criterion_group!(benches, iteration_vs_series, abel, truncation);
criterion_main!(benches);
