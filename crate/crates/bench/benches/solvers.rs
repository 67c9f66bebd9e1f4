use criterion::{criterion_group, criterion_main, Criterion};

use weightlab_core::varsolve::{
    pd_full_min, pd_radial_min, pm_min, sw_compare, FeSettings, RayleighParams, SolverSettings, SymmetricDomain,
};

fn solvers(c: &mut Criterion) {
    let mut g = c.benchmark_group("solvers");
    g.sample_size(10);
    let settings = SolverSettings::default().with_grid(100, 64);
    let pd = RayleighParams::new(2, 2.0, 2.5, 0.0, 8.0).unwrap();
    g.bench_function("pd_radial_min M=400", |b| {
        let s = SolverSettings::default().with_grid(400, 1);
        b.iter(|| pd_radial_min(&pd, &s).unwrap())
    });
    g.bench_function("pd_full_min 100x64 gamma=8", |b| {
        b.iter(|| pd_full_min(&pd, &settings).unwrap())
    });
    for q in [2.0, 3.0] {
        let p = RayleighParams::mean_zero(q, -1.0).unwrap();
        g.bench_function(format!("pm_min 100x64 q={q}"), |b| {
            b.iter(|| pm_min(&p, &settings).unwrap())
        });
    }
    g.bench_function("sw_compare square 32x64", |b| {
        let fe = FeSettings {
            rings: 32,
            directions: 64,
        };
        let sq = SymmetricDomain::square(2.0);
        b.iter(|| sw_compare(&sq, 1.0, 2, &fe).unwrap())
    });
    g.finish();
}

criterion_group!(benches, solvers);
criterion_main!(benches);
