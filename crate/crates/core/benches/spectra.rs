use std::hint::black_box;

use block_casimir::quadrature::{integrate_spectrum, SpectralQuantity, Tolerance};
use block_casimir::spectra::spectrum_scan;
use block_casimir::{ExecMode, MaterialModel};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, ExecMode); 2] = [("serial", ExecMode::Serial), ("parallel", ExecMode::Parallel)];

fn scan(c: &mut Criterion) {
    let gold = MaterialModel::gold();
    let grid: Vec<f64> = (0..4000).map(|i| 0.1 + 19.9 * i as f64 / 3999.0).collect();
    let mut group = c.benchmark_group("spectrum_scan gold L=50.68 x4000");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| spectrum_scan(&gold, 50.68, black_box(&grid), mode).unwrap())
        });
    }
    group.finish();
}

fn total_energy(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate_spectrum L=5.068");
    group.sample_size(10);
    for (material, model) in [("gold", MaterialModel::gold()), ("dielectric", MaterialModel::dielectric())] {
        for (name, mode) in MODES {
            let tol = Tolerance::new(1e-6).with_mode(mode);
            group.bench_function(BenchmarkId::new(material, name), |b| {
                b.iter(|| integrate_spectrum(&model, black_box(5.068), SpectralQuantity::TotalCasimir, &tol).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, scan, total_energy);
criterion_main!(benches);
