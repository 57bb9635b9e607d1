use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use m2ch_bench::gaussian_state;
use m2ch_core::{compute_pq, compute_pq_direct};

fn kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("compute_pq");
    for n in [1024, 4096, 16384] {
        let x = gaussian_state(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| b.iter(|| compute_pq(x).unwrap()));
    }
    g.finish();

    let mut g = c.benchmark_group("compute_pq_direct");
    g.sample_size(10);
    for n in [512, 1024] {
        let x = gaussian_state(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| b.iter(|| compute_pq_direct(x).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, kernel);
criterion_main!(benches);
