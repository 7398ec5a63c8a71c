use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use friendly_bench::{block_ball, cantor, gasket, integer_matrix, overlapping_balls};
use friendly_core::analysis::rationals_in_six_dilate;
use friendly_core::geometry::integer_determinant;
use friendly_core::{enumerate_rationals, greedy_cover, measure_of_ball, sample_measure, AxisBox, Ball};
use num_bigint::BigInt;

fn measure(c: &mut Criterion) {
    let k = cantor();
    let g = gasket();
    let kb = Ball::new(vec![0.3], 0.2).unwrap();
    let gb = Ball::new(vec![0.4, 0.3], 0.25).unwrap();
    let mut group = c.benchmark_group("measure_of_ball");
    group.bench_function("cantor_tol1e-4", |b| b.iter(|| measure_of_ball(&k, black_box(&kb), 1e-4).unwrap()));
    group.bench_function("gasket_tol1e-3", |b| b.iter(|| measure_of_ball(&g, black_box(&gb), 1e-3).unwrap()));
    group.finish();
}

fn cover(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy_cover");
    for (count, d) in [(500, 2), (5000, 2), (5000, 3)] {
        let balls = overlapping_balls(count, d, 0.02);
        group.bench_function(format!("{count}x{d}d"), |b| b.iter(|| greedy_cover(black_box(&balls)).unwrap()));
    }
    group.finish();
}

fn determinant(c: &mut Criterion) {
    let mut group = c.benchmark_group("integer_determinant");
    for (n, bits) in [(3, 20), (4, 40), (8, 60)] {
        let m: Vec<Vec<BigInt>> =
            integer_matrix(n, bits).into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        group.bench_function(format!("{n}x{n}_{bits}bit"), |b| {
            b.iter_batched(|| m.clone(), integer_determinant, BatchSize::SmallInput)
        });
    }
    group.finish();
}

fn enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_rationals");
    let window = AxisBox::new(vec![0.2, 0.2], vec![0.3, 0.3]).unwrap();
    group.bench_function("d2_n6_window", |b| b.iter(|| enumerate_rationals(2, 6, black_box(&window)).unwrap()));
    let (ball, _) = block_ball(6, 2);
    group.bench_function("six_dilate_d2_n6", |b| b.iter(|| rationals_in_six_dilate(black_box(&ball), 6).unwrap()));
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let k = cantor();
    let g = gasket();
    let mut group = c.benchmark_group("sample_measure");
    group.sample_size(20);
    group.bench_function("cantor_1e4", |b| b.iter(|| sample_measure(&k, 10_000, black_box(1)).unwrap()));
    group.bench_function("gasket_1e4", |b| b.iter(|| sample_measure(&g, 10_000, black_box(1)).unwrap()));
    group.finish();
}

criterion_group!(benches, measure, cover, determinant, enumerate, sampling);
criterion_main!(benches);
