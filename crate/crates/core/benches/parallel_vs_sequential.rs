use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use loopcas_core::par::Execution;
use loopcas_core::suites::{self, SuiteOptions};

fn suites_by_execution(c: &mut Criterion) {
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        let opts = SuiteOptions { seed: 7, exec };
        group.bench_function(BenchmarkId::new("transgression", name), |b| {
            b.iter(|| suites::transgression_suite(40, opts).unwrap())
        });
        group.bench_function(BenchmarkId::new("heisenberg", name), |b| {
            b.iter(|| suites::heisenberg_suite(100, 40, opts).unwrap())
        });
        group.bench_function(BenchmarkId::new("factorization", name), |b| {
            b.iter(|| suites::factorization_suite(1, opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, suites_by_execution);
criterion_main!(benches);
