use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use holevo_core::channel::lambda4;
use holevo_core::holevo::{build_lattice, refine_capacity, restricted_capacity};
use holevo_core::matrix::hermitian_eigenvalues;
use holevo_core::rng::seeded;
use holevo_core::search::{random_state, superadd_check, Sampling};
use holevo_core::{ComplexMatrix, C64};

fn hermitian(dim: usize, seed: u64) -> ComplexMatrix {
    let mut k = seed;
    let m = ComplexMatrix::from_fn(dim, |i, j| {
        k = k.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let a = (k >> 11) as f64 / (1u64 << 53) as f64;
        C64::new(a - 0.5, (i as f64 - j as f64) * 0.01)
    });
    m.hermitian_part()
}

fn eigen(c: &mut Criterion) {
    for dim in [4, 16, 64] {
        let h = hermitian(dim, 1);
        c.bench_function(&format!("jacobi eigenvalues {dim}x{dim}"), |b| {
            b.iter(|| hermitian_eigenvalues(black_box(&h)).unwrap())
        });
    }
}

fn capacity(c: &mut Criterion) {
    let ch = lambda4();
    let mut group = c.benchmark_group("lambda4");
    group.sample_size(10);
    for k in [10, 20, 40] {
        let lat = build_lattice(k).unwrap();
        group.bench_function(format!("restricted k={k}"), |b| {
            b.iter(|| restricted_capacity(black_box(&ch), &lat, 1e-12).unwrap())
        });
    }
    let seed = restricted_capacity(&ch, &build_lattice(20).unwrap(), 1e-12).unwrap();
    group.bench_function("refine from k=20", |b| b.iter(|| refine_capacity(&ch, black_box(&seed), 1e-12).unwrap()));
    group.finish();
}

fn superadd(c: &mut Criterion) {
    let mut rng = seeded(7);
    let states: Vec<_> = (0..64).map(|_| random_state(&mut rng, Sampling::Gaussian)).collect();
    let mut i = 0;
    c.bench_function("superadd_check", |b| {
        b.iter(|| {
            i = (i + 1) % states.len();
            superadd_check(black_box(&states[i])).unwrap()
        })
    });
}

criterion_group!(benches, eigen, capacity, superadd);
criterion_main!(benches);
