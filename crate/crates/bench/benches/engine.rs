use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stickelberger_bench::{cyclotomic, CONDUCTORS};
use stickelberger_core::characters::enumerate_characters;
use stickelberger_core::stickelberger::{character_identity_check, fourier_reconstruct};
use stickelberger_core::sweep::{self, Grid};
use stickelberger_core::{build_theta_tower, stickelberger_index, theta, TowerSpec};

fn theta_by_conductor(c: &mut Criterion) {
    let mut group = c.benchmark_group("theta");
    for f in CONDUCTORS {
        let field = cyclotomic(f);
        group.bench_with_input(BenchmarkId::from_parameter(f), &field, |b, field| {
            b.iter(|| theta(black_box(2), black_box(11), field).unwrap())
        });
    }
    group.finish();
}

fn characters(c: &mut Criterion) {
    let field = cyclotomic(15);
    let t = theta(1, 7, &field).unwrap();
    let chars = enumerate_characters(&field);
    c.bench_function("character_identity/f=15", |b| {
        b.iter(|| {
            for chi in &chars {
                assert!(character_identity_check(&t, chi).unwrap().holds);
            }
        })
    });
    c.bench_function("fourier_reconstruct/f=15", |b| {
        b.iter(|| fourier_reconstruct(black_box(&t.value)).unwrap())
    });
}

fn tower(c: &mut Criterion) {
    let spec = TowerSpec::new(&cyclotomic(3), 5, 2).unwrap();
    c.bench_function("tower/f=3,l=5,depth=2", |b| {
        b.iter(|| build_theta_tower(&spec, black_box(1), black_box(7)).unwrap())
    });
}

fn index(c: &mut Criterion) {
    let mut group = c.benchmark_group("stickelberger_index");
    for p in [11u64, 23] {
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
            b.iter(|| stickelberger_index(p).unwrap())
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let grid = Grid {
        f: 1..=20,
        n: 0..=2,
        b: 1..=20,
    };
    group.bench_function("integrality/f<=20", |b| {
        b.iter(|| sweep::integrality_sweep(&grid))
    });
    let grid = Grid {
        f: 1..=20,
        n: 1..=3,
        b: 1..=10,
    };
    group.bench_function("congruence/f<=20", |b| {
        b.iter(|| sweep::congruence_sweep(&grid, None))
    });
    group.finish();
}

criterion_group!(
    benches,
    theta_by_conductor,
    characters,
    tower,
    index,
    sweeps
);
criterion_main!(benches);
