use criterion::{black_box, criterion_group, criterion_main, Criterion};

use pmelab_core::exact::{barenblatt_field, power_profile, BarenblattParams};
use pmelab_core::kinetic::{dissipation_from_run, VGrid};
use pmelab_core::solvers::{solve_pme, PmeProblem, SnapshotStride};
use pmelab_core::spectral::{
    besov_profile_auto, nikolskii_seminorm, nondegeneracy_measure, slobodeckij_seminorm, ScanOptions,
    SymbolDescriptor, VInterval,
};
use pmelab_core::{dft_forward, lp_blocks, DyadicPartition, Grid};

fn fourier(c: &mut Criterion) {
    let g = Grid::periodic(1, 1 << 14, 1.0).unwrap();
    let u = power_profile(0.5, &g).unwrap();
    c.bench_function("dft_forward 2^14", |b| b.iter(|| dft_forward(black_box(&u)).unwrap()));
    let part = DyadicPartition::for_grid(&g);
    c.bench_function("lp_blocks 2^14", |b| b.iter(|| lp_blocks(black_box(&u), &part).unwrap()));
    c.bench_function("besov_profile 2^14", |b| b.iter(|| besov_profile_auto(black_box(&u), 2.0).unwrap()));
}

fn seminorms(c: &mut Criterion) {
    let g = Grid::periodic(1, 1 << 10, 1.0).unwrap();
    let u = power_profile(0.75, &g).unwrap();
    c.bench_function("slobodeckij 2^10", |b| b.iter(|| slobodeckij_seminorm(black_box(&u), 0.5, 2.0).unwrap()));
    c.bench_function("nikolskii 2^10", |b| b.iter(|| nikolskii_seminorm(black_box(&u), 0.5, 2.0).unwrap()));
}

fn solver(c: &mut Criterion) {
    let p = BarenblattParams::new(2.0, 1, 1.0, 1.0).unwrap();
    let g = Grid::periodic(1, 256, 16.0).unwrap();
    let u0 = barenblatt_field(&p, &g, 0.0).unwrap();
    let pb = PmeProblem::new(2.0, u0, 0.1);
    c.bench_function("solve_pme 256 to t=0.1", |b| {
        b.iter(|| solve_pme(black_box(&pb), SnapshotStride::Every(0.01)).unwrap())
    });
    let tr = solve_pme(&pb, SnapshotStride::Every(0.01)).unwrap();
    let vg = VGrid::covering(tr.max_abs(), 101, 0.05).unwrap();
    c.bench_function("dissipation_from_run 256", |b| {
        b.iter(|| dissipation_from_run(black_box(&tr), 2.0, 0.0, &vg).unwrap())
    });
}

fn symbol(c: &mut Criterion) {
    let d = SymbolDescriptor::Pme { m: 2.0, dim: 1 };
    let iv = VInterval::new(-1.0, 1.0).unwrap();
    let o = ScanOptions::default();
    c.bench_function("nondegeneracy_measure J=8", |b| {
        b.iter(|| nondegeneracy_measure(&d, black_box(8.0), 1.0, &iv, &o).unwrap())
    });
}

criterion_group!(benches, fourier, seminorms, solver, symbol);
criterion_main!(benches);
