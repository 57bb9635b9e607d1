use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use m2ch_bench::{collision_state, gaussian_state};
use m2ch_core::{scenario::default_x_grid, step_rk4, to_eulerian};

fn evolution(c: &mut Criterion) {
    let mut g = c.benchmark_group("step_rk4");
    for n in [1024, 4096] {
        let x = gaussian_state(n);
        g.bench_with_input(BenchmarkId::new("gaussian", n), &x, |b, x| b.iter(|| step_rk4(x, 1e-3).unwrap()));
    }
    let x = collision_state(4096);
    g.bench_function("collision/4096", |b| b.iter(|| step_rk4(&x, 1e-3).unwrap()));
    g.finish();

    let x = gaussian_state(4096);
    c.bench_function("to_eulerian/4096", |b| b.iter(|| to_eulerian(&x, default_x_grid())));
}

criterion_group!(benches, evolution);
criterion_main!(benches);
