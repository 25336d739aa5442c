use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oscavg_bench::{dense_rhs, oscillator_case, real_spectrum, zero_mean_poly, OSCILLATOR_CASES};
use oscavg_core::averaging::{solve_homological, solve_sylvester};
use oscavg_core::oracle::{integrate_system, oscillator_coefficient, IntegrateOptions, Recording};
use oscavg_core::oscillator::build_oscillator_system;
use oscavg_core::rational::q;
use oscavg_core::{analyze_case, average_system, Frequency};

fn bench_sylvester(c: &mut Criterion) {
    let mut group = c.benchmark_group("sylvester");
    for n in [2, 3, 4] {
        let a0 = real_spectrum(n);
        let b = dense_rhs(n);
        let freq = Frequency(q(3, 2));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| solve_sylvester(black_box(&a0), &freq, black_box(&b)).unwrap())
        });
    }
    group.finish();
}

fn bench_homological(c: &mut Criterion) {
    let a0 = real_spectrum(4);
    let b = zero_mean_poly(4, 6);
    c.bench_function("homological/4x4_6_terms", |bench| bench.iter(|| solve_homological(black_box(&a0), black_box(&b)).unwrap()));
}

fn bench_averaging(c: &mut Criterion) {
    let mut group = c.benchmark_group("average_system");
    for i in 0..OSCILLATOR_CASES.len() {
        let (lambda, alpha) = oscillator_case(i);
        let spec = build_oscillator_system(&lambda, &alpha).unwrap();
        group.bench_function(format!("lambda={lambda},alpha={alpha}"), |bench| {
            bench.iter(|| average_system(black_box(&spec)).unwrap())
        });
    }
    group.finish();
}

fn bench_analyze(c: &mut Criterion) {
    let (lambda, alpha) = (q(2, 1), q(1, 2));
    c.bench_function("analyze_case/lambda=2,alpha=1/2", |bench| bench.iter(|| analyze_case(black_box(&lambda), &alpha).unwrap()));
}

fn bench_integration(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate_oscillator");
    group.sample_size(10);
    for horizon in [1e2, 1e3] {
        let opts = IntegrateOptions { recording: Recording::Endpoints, ..IntegrateOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(horizon), &horizon, |bench, &h| {
            bench.iter(|| integrate_system(oscillator_coefficient(2.0, 1.0), 2, 1.0, h, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sylvester, bench_homological, bench_averaging, bench_analyze, bench_integration);
criterion_main!(benches);
