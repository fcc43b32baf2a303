use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use thue_core::arith::PrimeSet;
use thue_core::count::{self, CountOptions};
use thue_core::exec;
use thue_core::forms::BinaryForm;
use thue_core::solve;

fn modes(c: &mut Criterion) {
    let form = BinaryForm::from_i64(&[1, 0, 0, -2]).unwrap();
    let empty = PrimeSet::empty();
    let s = PrimeSet::new(vec![2, 3, 5, 7]).unwrap();
    let opts = CountOptions::default();

    let mut g = c.benchmark_group("count_a");
    g.sample_size(10);
    for z in [10_000u64, 100_000] {
        g.bench_with_input(BenchmarkId::new("parallel", z), &z, |b, &z| {
            b.iter(|| count::count_a(&form, &empty, black_box(z), 0, &opts).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sequential", z), &z, |b, &z| {
            b.iter(|| exec::with_sequential(|| count::count_a(&form, &empty, black_box(z), 0, &opts).unwrap()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("solve_sunit");
    g.sample_size(10);
    for e in [8u32, 14] {
        g.bench_with_input(BenchmarkId::new("parallel", e), &e, |b, &e| {
            b.iter(|| solve::solve_sunit(&s, black_box(e)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sequential", e), &e, |b, &e| {
            b.iter(|| exec::with_sequential(|| solve::solve_sunit(&s, black_box(e)).unwrap()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("solve_thue_mahler");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| solve::solve_thue_mahler(&form, &s, black_box(300), None).unwrap())
    });
    g.bench_function("sequential", |b| {
        b.iter(|| exec::with_sequential(|| solve::solve_thue_mahler(&form, &s, black_box(300), None).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, modes);
criterion_main!(benches);
