use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use viscap::birman_schwinger::bs_determinant;
use viscap::deformation::{numerical_range_scan, DeformationSpec, ScanWindow};
use viscap::{build_grid, cap_matrix, eigenvalues, factorize, smallest_singular_value, Potential, C64};

fn eig(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigenvalues");
    g.sample_size(10);
    for n in [128, 256] {
        let grid = build_grid(12.0, n).unwrap();
        let a = cap_matrix(&grid, &Potential::sech2(8.0), 1e-2).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| eigenvalues(black_box(a)).unwrap()));
    }
    g.finish();
}

fn sigma_min(c: &mut Criterion) {
    let mut g = c.benchmark_group("sigma_min");
    g.sample_size(10);
    for n in [128, 256] {
        let grid = build_grid(12.0, n).unwrap();
        let mut a = cap_matrix(&grid, &Potential::zero(), 1e-2).unwrap();
        a.shift(C64::new(-0.9, 0.4));
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| smallest_singular_value(black_box(a))));
    }
    g.finish();
}

fn determinant(c: &mut Criterion) {
    let mut g = c.benchmark_group("bs_determinant");
    g.sample_size(10);
    for n in [200, 400] {
        let grid = build_grid(15.0, n).unwrap();
        let f = factorize(&Potential::sech2(8.0), &grid);
        g.bench_with_input(BenchmarkId::from_parameter(n), &(grid, f), |b, (grid, f)| {
            b.iter(|| bs_determinant(black_box(C64::new(2.0, -0.3)), grid, f).unwrap())
        });
    }
    g.finish();
}

fn symbol_scan(c: &mut Criterion) {
    let spec = DeformationSpec::scaled_tanh(0.4, 1.0);
    let win = ScanWindow { xi_max: 20.0, n: 200 };
    c.bench_function("numerical_range_scan/200", |b| {
        b.iter(|| numerical_range_scan(black_box(C64::new(0.0, -0.4)), &spec, &win).unwrap())
    });
}

criterion_group!(benches, eig, sigma_min, determinant, symbol_scan);
criterion_main!(benches);
