use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use quintiq::corpus::{ReferenceId, REFERENCES};
use quintiq::parallel::Execution;
use quintiq::{composite_pair_with, integrate_adaptive, DoubleDouble, Method, SearchStrategy};

fn composite(c: &mut Criterion) {
    let r = REFERENCES.iter().find(|r| r.id == ReferenceId::ExpTen).unwrap();
    let f64_fn = r.compile::<f64>();
    let f64_iv = r.interval::<f64>();
    let dd_fn = r.compile::<DoubleDouble>();
    let dd_iv = r.interval::<DoubleDouble>();

    let mut group = c.benchmark_group("composite_pair");
    for n in [64usize, 1024, 16384] {
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(format!("f64/{name}"), n), &n, |b, &n| {
                b.iter(|| composite_pair_with(Method::Quintic, &f64_fn, &f64_iv, black_box(n), exec).unwrap())
            });
            group.bench_with_input(BenchmarkId::new(format!("dd/{name}"), n), &n, |b, &n| {
                b.iter(|| composite_pair_with(Method::Quintic, &dd_fn, &dd_iv, black_box(n), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn adaptive(c: &mut Criterion) {
    let f = |x: &DoubleDouble| DoubleDouble::from(1.0) / *x;
    let iv = quintiq::Interval::from_f64(1.0, 2.0).unwrap();
    let eps = DoubleDouble::from(1e-16);
    c.bench_function("adaptive_reciprocal_dd_1e-16", |b| {
        b.iter(|| integrate_adaptive(&f, &iv, black_box(&eps), SearchStrategy::LinearMinimal, 10_000).unwrap())
    });
}

criterion_group!(benches, composite, adaptive);
criterion_main!(benches);
