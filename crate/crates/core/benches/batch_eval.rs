//! Sequential against parallel batch evaluation.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hbnet::constructions::{build_fem2d_with, build_monomial, fem_to_placements, Monomial};
use hbnet::fem2d::{FemFunction2D, UniformMesh2D};
use hbnet::net::eval_batch;
use hbnet::parallel::Execution;
use hbnet::net::ReluNet;
use hbnet::pwl::{random_points, sup_error_sampled};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn batch_eval(c: &mut Criterion) {
    let m = Monomial::new(vec![2, 1, 1]).unwrap();
    let net = build_monomial(&m, 4).unwrap();
    let points = random_points(&[(-1.0, 1.0); 3], 10_000, 1);
    let mut group = c.benchmark_group("monomial_eval_10k");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| eval_batch(&net, black_box(&points), exec).unwrap())
        });
    }
    group.finish();
}

fn sampled_sup(c: &mut Criterion) {
    let m = Monomial::new(vec![1, 1, 1, 1]).unwrap();
    let net = build_monomial(&m, 3).unwrap();
    let dom = [(-1.0, 1.0); 4];
    let mut group = c.benchmark_group("monomial_sup_error_10k");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sup_error_sampled(|x| net.eval(x), |x| Ok(m.eval(x)), &dom, &[], 10_000, 2, exec).unwrap())
        });
    }
    group.finish();
}

fn fem_build(c: &mut Criterion) {
    let f = FemFunction2D::random(UniformMesh2D::unit_square(4).unwrap(), 3);
    let placements = fem_to_placements(&f);
    let mut group = c.benchmark_group("fem_build_level4");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| build_fem2d_with(black_box(&placements), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, batch_eval, sampled_sup, fem_build);
criterion_main!(benches);
