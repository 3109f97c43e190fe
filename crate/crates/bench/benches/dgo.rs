use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dgo_core::{
    evaluate_batch, generate_children, run, BitString, EvalBackend, Objective, Quadratic,
    Quantizer, RunConfig, Shekel,
};

fn children(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_children");
    for len in [16usize, 64, 256] {
        let parent = BitString::new((0..len).map(|i| i % 3 == 0).collect()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(len), &parent, |b, p| {
            b.iter(|| generate_children(black_box(p)))
        });
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let objective = Shekel::default_4d();
    let q = Quantizer::new(objective.bounds().to_vec(), 12).unwrap();
    let parent = BitString::new((0..q.bit_len()).map(|i| i % 5 < 2).collect()).unwrap();
    let set = generate_children(&parent);
    let mut group = c.benchmark_group("evaluate_batch");
    for backend in [EvalBackend::Sequential, EvalBackend::WorkerPool(2)] {
        let name = format!("{backend:?}");
        group.bench_function(name, |b| {
            b.iter(|| evaluate_batch(&set, &objective, &q, &backend).unwrap())
        });
    }
    group.finish();
}

// Full sequential runs at a fixed resolution; time per run grows roughly
// with the square of the dimension.
fn full_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_quadratic_b8");
    for dims in [2usize, 4, 8, 12] {
        let objective = Quadratic::centered(dims);
        let cfg = RunConfig::new(8, 8).with_seed(1);
        group.bench_with_input(BenchmarkId::from_parameter(dims), &cfg, |b, cfg| {
            b.iter(|| run(cfg, &objective, &EvalBackend::Sequential).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, children, batch, full_run);
criterion_main!(benches);
