use std::hint::black_box;

use carpetlab_bench::{pair_27_8, pair_6_4};
use carpetlab_core::classify::{compare, CompareConfig};
use carpetlab_core::geometry::{components, enumerate_squares, PieceKind, DEFAULT_BUDGET};
use carpetlab_core::spectrum::{dimensions, spectra_equal, spectrum_curve};
use criterion::{criterion_group, criterion_main, Criterion};

fn geometry(c: &mut Criterion) {
    let (d, _) = pair_27_8();
    c.bench_function("enumerate_squares rank 4", |b| {
        b.iter(|| enumerate_squares(&d, black_box(4), DEFAULT_BUDGET).unwrap().count())
    });
    let (d, _) = pair_6_4();
    c.bench_function("components rank 4", |b| {
        b.iter(|| components(&d, black_box(4), PieceKind::TildeApprox, DEFAULT_BUDGET).unwrap().len())
    });
}

fn spectrum(c: &mut Criterion) {
    let (d, dp) = pair_27_8();
    c.bench_function("dimensions 256 bits", |b| b.iter(|| dimensions(black_box(d.profile()), 256).unwrap()));
    c.bench_function("spectrum_curve grid 32", |b| {
        b.iter(|| spectrum_curve(black_box(d.profile()), 32, 256).unwrap())
    });
    c.bench_function("spectra_equal", |b| {
        b.iter(|| spectra_equal(black_box(d.profile()), dp.profile(), 256).unwrap())
    });
    let config = CompareConfig::default();
    c.bench_function("compare", |b| b.iter(|| compare(black_box(&d), &dp, &config).unwrap()));
}

criterion_group!(benches, geometry, spectrum);
criterion_main!(benches);
