use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use curved_ingham::linalg::hermitian_eigen;
use curved_ingham_bench::hermitian_fixture;

fn eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eigen");
    for dim in [11usize, 41, 61] {
        let a = hermitian_fixture(dim);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &a, |b, a| b.iter(|| hermitian_eigen(a)));
    }
    group.finish();
}

criterion_group!(benches, eigen);
criterion_main!(benches);
