//! Factorization kernels at the sizes the samplers use: 1000 x 1000
//! snapshot matrices and rank ~100 bases.

use criterion::{criterion_group, criterion_main, Criterion};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pinndeim::linalg::{leverage_sample_columns, qr_column_pivot, randomized_svd, svd};

fn snapshot_like(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    // Smoothly decaying spectrum, similar to a residual history.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes = 40.min(cols);
    let u = Array2::<f64>::from_shape_fn((rows, modes), |_| rng.gen::<f64>() - 0.5);
    let v = Array2::<f64>::from_shape_fn((modes, cols), |(m, _)| {
        (rng.gen::<f64>() - 0.5) * 0.7f64.powi(m as i32)
    });
    u.dot(&v)
}

fn bench_svd(c: &mut Criterion) {
    let a = snapshot_like(1000, 1000, 1);
    let mut group = c.benchmark_group("svd");
    group.sample_size(10);
    group.bench_function("thin_svd_1000x1000", |b| b.iter(|| svd(&a).unwrap()));
    group.finish();
}

fn bench_randomized_svd(c: &mut Criterion) {
    let a = snapshot_like(1000, 1000, 2);
    let mut group = c.benchmark_group("randomized_svd");
    group.sample_size(10);
    group.bench_function("rank100_oversample10_power2", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            randomized_svd(&a, 100, 10, 2, &mut rng).unwrap()
        })
    });
    group.finish();
}

fn bench_pivoted_qr(c: &mut Criterion) {
    let a = snapshot_like(1000, 1000, 4);
    let vk = svd(&a).unwrap().leading_left(100);
    let vkt = vk.t().to_owned();
    let mut group = c.benchmark_group("qr_column_pivot");
    group.sample_size(10);
    group.bench_function("basis_100x1000", |b| {
        b.iter(|| qr_column_pivot(&vkt).unwrap())
    });
    group.finish();
}

fn bench_leverage_sampling(c: &mut Criterion) {
    let a = snapshot_like(1000, 1000, 5);
    let vk = svd(&a).unwrap().leading_left(40);
    let vkt = vk.t().to_owned();
    c.bench_function("leverage_sample_150_of_1000", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            leverage_sample_columns(&vkt, 150, &mut rng).unwrap()
        })
    });
}

criterion_group!(
    kernels,
    bench_svd,
    bench_randomized_svd,
    bench_pivoted_qr,
    bench_leverage_sampling
);
criterion_main!(kernels);
