use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use warpbench::analysis::{empirical_estimate_with, EstimateConfig, EstimateProblem};
use warpbench::catalog;
use warpbench::system::{verify, VerifyOptions};
use warpbench::{Exec, Grid};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn verify_sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    for id in ["ex1", "ex4"] {
        let e = catalog::entry(id).unwrap();
        for count in [401, 4001] {
            let grid = Grid::new(e.grid.min, e.grid.max, count).unwrap();
            for (name, exec) in MODES {
                let opts = VerifyOptions {
                    exec,
                    ..VerifyOptions::default()
                };
                g.bench_with_input(
                    BenchmarkId::new(format!("{id}/{name}"), count),
                    &grid,
                    |b, grid| b.iter(|| verify(black_box(&e.ansatz), grid, &opts).unwrap()),
                );
            }
        }
    }
    g.finish();
}

fn estimate_sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimate");
    let pb = EstimateProblem::lichnerowicz(&catalog::ex1(3, 2).unwrap()).unwrap();
    for points in [401, 4001] {
        let cfg = EstimateConfig {
            points,
            ..EstimateConfig::with_radius(8.0)
        };
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, points), &cfg, |b, cfg| {
                b.iter(|| empirical_estimate_with(cfg, black_box(&pb), exec).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, verify_sweep, estimate_sweep);
criterion_main!(benches);
