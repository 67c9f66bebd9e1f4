use criterion::{black_box, criterion_group, criterion_main, Criterion};

use weightlab_core::bessel::{bessel_j, bessel_zero, robin_root, BesselOrder};
use weightlab_core::diskspec::{neumann_angular_upsilon1, DiskSpectrumParams};
use weightlab_core::rearrange::{
    compatible_halfspaces, foliated_schwarz, hardy_littlewood_check, two_point_energy_check,
};
use weightlab_perf::{disk_grid, random_field};

fn bessel(c: &mut Criterion) {
    let order = BesselOrder::new(1.5).unwrap();
    c.bench_function("bessel_j nu=1.5 on (0, 30]", |b| {
        b.iter(|| {
            (1..=100)
                .map(|i| bessel_j(order, black_box(0.3 * i as f64)).unwrap())
                .sum::<f64>()
        })
    });
    c.bench_function("bessel_zero nu=1.5 k=5", |b| {
        b.iter(|| bessel_zero(order, black_box(5)).unwrap())
    });
    c.bench_function("robin_root nu=0.5 alpha=1", |b| {
        let o = BesselOrder::new(0.5).unwrap();
        b.iter(|| robin_root(o, black_box(1.0), 1).unwrap())
    });
    c.bench_function("upsilon1 N=3 alpha=1", |b| {
        let p = DiskSpectrumParams::new(3, 1.0, 1.0).unwrap();
        b.iter(|| neumann_angular_upsilon1(black_box(&p)).unwrap())
    });
}

fn rearrangements(c: &mut Criterion) {
    let grid = disk_grid(64, 64);
    let u = random_field(&grid, 1);
    let v = random_field(&grid, 2);
    let h = compatible_halfspaces(&grid)[5];
    c.bench_function("two-point energy check 64x64", |b| {
        b.iter(|| two_point_energy_check(black_box(&u), &h, 0.5).unwrap())
    });
    c.bench_function("foliated schwarz 64x64", |b| {
        b.iter(|| foliated_schwarz(black_box(&u), 0.0).unwrap())
    });
    c.bench_function("hardy-littlewood 64x64", |b| {
        b.iter(|| hardy_littlewood_check(black_box(&u), &v, 0.5).unwrap())
    });
}

criterion_group!(benches, bessel, rearrangements);
criterion_main!(benches);
