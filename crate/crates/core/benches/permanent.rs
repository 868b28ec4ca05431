use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spdc_boson::parallel::{current_workers, with_workers};
use spdc_boson::permanent::{permanent, permanent_with_multiplicities};
use spdc_boson::Complex64;

fn random_matrix(n: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

// Builds without the `parallel` feature run both arms on one thread.
fn ryser(c: &mut Criterion) {
    let all = current_workers();
    let mut group = c.benchmark_group("ryser");
    group.sample_size(10);
    for n in [10usize, 12, 14, 16, 18] {
        let a = random_matrix(n, n as u64);
        group.bench_with_input(BenchmarkId::new("sequential", n), &a, |b, a| {
            with_workers(Some(1), || b.iter(|| permanent(a).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new(format!("parallel-{all}"), n), &a, |b, a| {
            b.iter(|| permanent(a).unwrap())
        });
    }
    group.finish();
}

fn bunched(c: &mut Criterion) {
    // Three input modes holding four photons each against twelve single columns.
    let a = random_matrix(12, 99);
    let rows = DMatrix::from_fn(3, 12, |i, j| a[(i, j)]);
    let mut group = c.benchmark_group("bunched-12");
    group.bench_function("multiplicities", |b| {
        b.iter(|| permanent_with_multiplicities(&rows, &[4, 4, 4], &[1; 12], 20).unwrap())
    });
    let expanded = DMatrix::from_fn(12, 12, |i, j| a[(i / 4, j)]);
    group.bench_function("expanded", |b| with_workers(Some(1), || b.iter(|| permanent(&expanded).unwrap())));
    group.finish();
}

criterion_group!(benches, ryser, bunched);
criterion_main!(benches);
