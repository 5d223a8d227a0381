use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rsfa_bench::{scattered, strip};
use rsfa_core::{solve_rsfa_exact, solve_rsfa_fpt, solve_rsfa_ptas, PtasConfig};

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    for n in [6, 8, 10, 12] {
        let inst = scattered(n, 2, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| solve_rsfa_exact(black_box(inst)).unwrap())
        });
    }
    group.finish();
}

fn fpt(c: &mut Criterion) {
    let mut group = c.benchmark_group("fpt_h4");
    for v in [16, 32, 64, 128] {
        let inst = strip(v, 4);
        group.bench_with_input(BenchmarkId::from_parameter(v), &inst, |b, inst| {
            b.iter(|| solve_rsfa_fpt(black_box(inst)).unwrap())
        });
    }
    group.finish();
}

fn ptas(c: &mut Criterion) {
    let mut group = c.benchmark_group("ptas");
    group.sample_size(10);
    for (n, m, k) in [(3, 1, 1), (4, 1, 1), (3, 2, 2), (4, 1, 2)] {
        let inst = scattered(n, m, 7);
        let id = format!("n{n}_m{m}_k{k}");
        group.bench_with_input(BenchmarkId::from_parameter(id), &inst, |b, inst| {
            b.iter(|| solve_rsfa_ptas(black_box(inst), &PtasConfig::with_k(k)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, exact, fpt, ptas);
criterion_main!(benches);
