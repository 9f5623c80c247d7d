use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use walkvisits_core::asymptotics::convergence_report;
use walkvisits_core::exactwalk::joint_table;
use walkvisits_core::montecarlo::simulate;
use walkvisits_core::oracle::{dp_joint, enumerate_joint};
use walkvisits_core::powerseries::joint_gf_coeffs;

fn exact_tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    for n in [16u32, 64, 256] {
        g.bench_with_input(BenchmarkId::new("joint_table", n), &n, |b, &n| {
            b.iter(|| joint_table(black_box(n), 3).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("dp_joint", n), &n, |b, &n| {
            b.iter(|| dp_joint(black_box(n), 3).unwrap())
        });
    }
    g.bench_function("enumerate_joint/16", |b| b.iter(|| enumerate_joint(black_box(16), 3).unwrap()));
    g.finish();
}

fn generating_function(c: &mut Criterion) {
    let mut g = c.benchmark_group("joint_gf_coeffs");
    g.sample_size(10);
    for order in [24usize, 48] {
        g.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, &order| {
            b.iter(|| joint_gf_coeffs(black_box(order), 1, 2).unwrap())
        });
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    for workers in [1usize, 4] {
        g.bench_with_input(BenchmarkId::new("n100_100k", workers), &workers, |b, &w| {
            b.iter(|| simulate(100, 5, black_box(100_000), 7, w).unwrap())
        });
    }
    g.finish();
}

fn convergence(c: &mut Criterion) {
    let mut g = c.benchmark_group("convergence_report");
    g.sample_size(10);
    g.bench_function("n1024_z32", |b| b.iter(|| convergence_report(black_box(1024), 32).unwrap()));
    g.finish();
}

criterion_group!(benches, exact_tables, generating_function, monte_carlo, convergence);
criterion_main!(benches);
