//! Single-threaded vs. multi-threaded runs of the data-parallel kernels.
//!
//! Build with `--no-default-features` to time the plain-iterator fallback;
//! with the default `parallel` feature each kernel runs once on a one-thread
//! pool and once on the global pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;
use ridgequad::density::{convolve_density_with, ConvolutionMethod};
use ridgequad::diagnostics::monte_carlo_mean;
use ridgequad::models::{Model, ModelKind};
use ridgequad::nearridge::{fit_near_ridge, BudgetAllocation};
use ridgequad::{RidgeDirection, RidgeRule};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    vec![
        ("1-thread", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("pool", ThreadPoolBuilder::new().num_threads(threads).build().unwrap()),
    ]
}

fn kernels(c: &mut Criterion) {
    let a = RidgeDirection::ones(25).unwrap();
    let near = Model::with_default_direction(ModelKind::NearRidge, 0).unwrap();
    let rule = RidgeRule::build(near.direction(), 10_001, 11).unwrap();

    let mut group = c.benchmark_group("parallel");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::new("density_direct_4001", label), |b| {
            b.iter(|| pool.install(|| convolve_density_with(&a, 4001, ConvolutionMethod::Direct).unwrap()))
        });
        group.bench_function(BenchmarkId::new("near_ridge_profile_12x200", label), |b| {
            b.iter(|| {
                pool.install(|| {
                    fit_near_ridge(&rule, near.evaluator(), BudgetAllocation::Uniform(200), 1).unwrap()
                })
            })
        });
        group.bench_function(BenchmarkId::new("monte_carlo_1e5", label), |b| {
            b.iter(|| pool.install(|| monte_carlo_mean(near.evaluator(), 25, 100_000, 2)))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
