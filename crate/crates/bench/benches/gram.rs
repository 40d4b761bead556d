use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use curved_ingham::riesz::gram_matrix;
use curved_ingham_bench::parabola_system;

fn gram(c: &mut Criterion) {
    let mut group = c.benchmark_group("gram_matrix");
    group.sample_size(10);
    for n in [5i64, 10, 20] {
        let sys = parabola_system(n, 2.0);
        group.bench_with_input(BenchmarkId::from_parameter(2 * n + 1), &sys, |b, sys| {
            b.iter(|| gram_matrix(sys, 1e-10).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, gram);
criterion_main!(benches);
