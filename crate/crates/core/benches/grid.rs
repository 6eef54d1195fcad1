//! Sequential vs parallel grid classification on the two-generator annulus
//! and an exponential pair. Without the `parallel` feature both modes run
//! sequentially, so the two lines should coincide.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use semidyn_core::classify::{escaping_grid_with, fatou_julia_grid_with, ClassifyParams, GridRegion};
use semidyn_core::exec::Exec;
use semidyn_core::map::{HolomorphicMap, Sign};
use semidyn_core::semigroup::Semigroup;

fn annulus() -> Semigroup {
    let z2 = |a: f64| {
        HolomorphicMap::polynomial(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(a, 0.0)])
            .unwrap()
    };
    Semigroup::new("annulus", vec![z2(1.0), z2(0.5)]).unwrap()
}

fn exp_pair() -> Semigroup {
    let lambda = Complex64::new(0.3, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let shift = Complex64::new(0.0, 2.0 * std::f64::consts::PI / 0.3);
    let f = HolomorphicMap::exp_affine(Sign::Plus, lambda, zero, zero).unwrap();
    let g = HolomorphicMap::exp_affine(Sign::Plus, lambda, zero, shift).unwrap();
    Semigroup::new("exp pair", vec![f, g]).unwrap()
}

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn fatou_julia(c: &mut Criterion) {
    let s = annulus();
    let p = ClassifyParams {
        max_word_len: 4,
        ..Default::default()
    };
    let mut group = c.benchmark_group("fatou_julia_annulus");
    group.sample_size(10);
    for size in [32usize, 64] {
        let region = GridRegion::square(3.0, size).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, size), &region, |b, region| {
                b.iter(|| fatou_julia_grid_with(&s, black_box(region), &p, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn escaping(c: &mut Criterion) {
    let s = exp_pair();
    let p = ClassifyParams::default();
    let mut group = c.benchmark_group("escaping_exp_pair");
    group.sample_size(10);
    for size in [64usize, 128] {
        let region =
            GridRegion::new(Complex64::new(0.0, -12.0), Complex64::new(24.0, 12.0), size, size).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, size), &region, |b, region| {
                b.iter(|| escaping_grid_with(&s, black_box(region), &p, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, fatou_julia, escaping);
criterion_main!(benches);
