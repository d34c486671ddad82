//! Sequential versus parallel timings for the dense kernels.
//!
//! "sequential" runs inside a one-thread rayon pool, which is what the
//! kernels reduce to without the `parallel` feature.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fup_core::baker::{build_baker, BakerAlphabet, CutoffProfile};
use fup_core::cantor::{iterate, Alphabet1D, Alphabet2D};
use fup_core::dft::fup_norm;
use fup_core::lines::orthogonal_pair_condition;
use fup_core::polymethod::{eval_zero_set, BivarPoly};
use fup_core::ResourceCaps;
use num_complex::Complex64;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let seq = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let par = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("sequential", seq), ("parallel", par)]
}

fn bench_fup_norm(c: &mut Criterion) {
    let a = Alphabet2D::new(3, [(0, 0), (1, 1), (0, 2), (2, 1)]).unwrap();
    let x = iterate(&a, 4).unwrap().into_points();
    let mut g = c.benchmark_group("fup_norm M=3 k=4");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| fup_norm(black_box(&x), black_box(&x)).unwrap()))
        });
    }
    g.finish();
}

fn bench_baker(c: &mut Criterion) {
    let alpha = BakerAlphabet::One(Alphabet1D::new(3, [0, 2]).unwrap());
    let caps = ResourceCaps::default();
    let mut g = c.benchmark_group("build_baker 1D M=3 k=6");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| build_baker(&alpha, 6, &CutoffProfile::smooth_bump(), &caps).unwrap()))
        });
    }
    g.finish();
}

fn bench_zero_set(c: &mut Criterion) {
    let one = |v: f64| Complex64::new(v, 0.0);
    let f = BivarPoly::new([((2, 0), one(1.0)), ((1, 1), one(4.0)), ((0, 1), one(1.0)), ((0, 0), one(-1.0))]);
    let mut g = c.benchmark_group("eval_zero_set N=256");
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| eval_zero_set(black_box(&f), 256).unwrap()))
        });
    }
    g.finish();
}

fn bench_pairs(c: &mut Criterion) {
    let a = Alphabet2D::new(4, (0..4).flat_map(|x| (0..4).map(move |y| (x, y))).filter(|&(x, y)| (x + y) % 3 != 1))
        .unwrap();
    let mut g = c.benchmark_group("orthogonal_pair_condition M=4");
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| orthogonal_pair_condition(black_box(&a), black_box(&a)).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_fup_norm, bench_baker, bench_zero_set, bench_pairs);
criterion_main!(benches);
