use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use nsfd_bench::{host_vector, host_vector_state, test_matrix};
use nsfd_core::linalg::eigenvalues;
use nsfd_core::{step_bound, step_forward};

fn bench_step(c: &mut Criterion) {
    let model = host_vector();
    let x = host_vector_state();
    c.bench_function("step_forward/host-vector", |b| {
        b.iter(|| step_forward(black_box(&model), black_box(&x), 0.5).unwrap())
    });
    c.bench_function("step_bound/host-vector", |b| {
        b.iter(|| step_bound(black_box(&model)))
    });
}

fn bench_eigen(c: &mut Criterion) {
    for n in [5, 16, 32] {
        let a = test_matrix(n);
        c.bench_function(&format!("eigenvalues/{n}"), |b| {
            b.iter(|| eigenvalues(black_box(&a)).unwrap())
        });
    }
}

criterion_group!(benches, bench_step, bench_eigen);
criterion_main!(benches);
