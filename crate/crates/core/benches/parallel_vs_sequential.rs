use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gipsynth::geometry::PhysicalConstants;
use gipsynth::helicoidal::{
    check_surface, default_xi_grid, minimal_surface_embedding, MinimalFamily,
};
use gipsynth::mesh::mesh_surface;
use gipsynth::par::Execution;
use gipsynth::schrodinger::{sweep_m_chi, BoxOptions};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn spectra(c: &mut Criterion) {
    let fam = MinimalFamily::new(1.0, 3.0, 0.0).unwrap();
    let nat = PhysicalConstants::natural();
    let opts = BoxOptions {
        max_doublings: 0,
        ..BoxOptions::default()
    };
    let ms: Vec<i64> = (0..8).collect();
    let mut g = c.benchmark_group("sweep_m_chi");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sweep_m_chi(&fam, black_box(&ms), &nat, &opts, exec).unwrap())
        });
    }
    g.finish();
}

fn surfaces(c: &mut Criterion) {
    let fam = MinimalFamily::new(1.0, 3.0, 0.0).unwrap();
    let hs = minimal_surface_embedding(&fam, &default_xi_grid((-2.0, 2.0))).unwrap();
    let s = hs.surface();
    let nat = PhysicalConstants::natural();

    let mut g = c.benchmark_group("check_surface");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_surface(&hs, black_box(41), 16, exec).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("mesh_surface");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| mesh_surface(&s, black_box(96), 96, &nat, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, spectra, surfaces);
criterion_main!(benches);
