use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use thinlayer_bench::{orthogonal_sample, unit_source, winkler_case, LATTICES};
use thinlayer_core::compressible::{solve_winkler, winkler_force};
use thinlayer_core::incompressible::elliptic_contact_solve;
use thinlayer_core::poisson::poisson_solve_dirichlet;
use thinlayer_core::sensitivity::pressure_variation;
use thinlayer_core::{DiskGrid, ParaboloidGap};

fn poisson(c: &mut Criterion) {
    let mut group = c.benchmark_group("poisson_unit_source");
    group.sample_size(10);
    for cells in LATTICES {
        let (domain, rhs) = unit_source(cells);
        group.bench_with_input(BenchmarkId::from_parameter(cells), &rhs, |b, rhs| {
            b.iter(|| poisson_solve_dirichlet(&domain, black_box(rhs)).unwrap())
        });
    }
    group.finish();
}

fn sensitivity(c: &mut Criterion) {
    let prob = orthogonal_sample();
    let mut group = c.benchmark_group("pressure_variation");
    group.sample_size(10);
    for cells in [64, 128] {
        let grid = DiskGrid::new(cells).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(cells), &grid, |b, &grid| {
            b.iter(|| pressure_variation(black_box(&prob), grid).unwrap())
        });
    }
    group.finish();
}

fn elliptic(c: &mut Criterion) {
    let gaps: Vec<ParaboloidGap> = [1.0, 2.5, 10.0, 80.0]
        .iter()
        .map(|&ratio| ParaboloidGap::new(ratio, 1.0, 0.05).unwrap())
        .collect();
    c.bench_function("elliptic_contact_solve", |b| {
        b.iter(|| {
            for gap in &gaps {
                black_box(elliptic_contact_solve(0.8, black_box(gap)).unwrap());
            }
        })
    });
}

fn winkler(c: &mut Criterion) {
    let (material, layer, gap) = winkler_case();
    c.bench_function("winkler_force", |b| {
        b.iter(|| winkler_force(&material, &layer, black_box(&gap)).unwrap())
    });
    let grid = DiskGrid::new(128).unwrap();
    c.bench_function("solve_winkler_128", |b| {
        b.iter(|| solve_winkler(&material, &layer, black_box(&gap), grid).unwrap())
    });
}

criterion_group!(benches, poisson, sensitivity, elliptic, winkler);
criterion_main!(benches);
