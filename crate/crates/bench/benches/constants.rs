use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use inscribed_bench::{params, spaces};
use inscribed_core::{estimate, run_audit, sample_T, ConstantId};

fn triangle_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_T");
    for (name, spec) in spaces() {
        for grid in [256, 1024] {
            let p = params(grid).sampling;
            group.bench_with_input(BenchmarkId::new(name, grid), &p, |b, p| b.iter(|| sample_T(&spec, p).unwrap()));
        }
    }
    group.finish();
}

fn single_constants(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate");
    group.sample_size(10);
    let p = params(512);
    for (name, spec) in spaces() {
        for id in [ConstantId::GL, ConstantId::J, ConstantId::Delta(1.0)] {
            group.bench_function(BenchmarkId::new(name, id), |b| b.iter(|| estimate(&spec, id, &p).unwrap()));
        }
    }
    group.finish();
}

fn audit(c: &mut Criterion) {
    let mut group = c.benchmark_group("audit");
    group.sample_size(10);
    let p = params(256);
    for (name, spec) in spaces() {
        group.bench_function(name, |b| b.iter(|| run_audit(&spec, 1e-6, &p).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, triangle_sampling, single_constants, audit);
criterion_main!(benches);
