use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use curved_ingham::oscint::oscillatory_integral;
use curved_ingham_bench::parabola;

fn integrals(c: &mut Criterion) {
    let curve = parabola();
    let mut group = c.benchmark_group("oscillatory_integral");
    for (n, m) in [(1i64, 0i64), (12, -11), (200, 150), (-1000, 999)] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{n},{m}")), &(n, m), |b, &(n, m)| {
            b.iter(|| oscillatory_integral(n, m, 2.0, &curve, 2.0, 1e-10).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, integrals);
criterion_main!(benches);
