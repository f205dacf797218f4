//! Hot kernels on the global rayon pool against a one-thread pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use aniso_core::cutoffs::SweepConfig;
use aniso_core::identities::suite::measure_sweep_with_mc;
use aniso_core::solver::{Propagator, SpeedTriple};
use aniso_core::spectral::{gradient, Grid, ScalarField, Spectrum};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let global = rayon::current_num_threads();
    vec![
        ("global", rayon::ThreadPoolBuilder::new().num_threads(global).build().unwrap()),
        ("serial", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
    ]
}

fn field(n: usize) -> ScalarField {
    let g = Grid::new(n, 16.0).unwrap();
    ScalarField::from_fn(g, 1.0, |x| x[0] * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp())
}

fn kernels(c: &mut Criterion) {
    let phi = field(64);
    let speeds = SpeedTriple::new([1.0, 4.0, 9.0]).unwrap();
    let prop = Propagator::new(*phi.grid(), &speeds, 0.1);
    let sweep = SweepConfig::lemma_default();

    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_with_input(BenchmarkId::new("gradient_64", name), &pool, |b, p| b.iter(|| p.install(|| gradient(&phi))));
        group.bench_with_input(BenchmarkId::new("propagate_64", name), &pool, |b, p| {
            let (mut a, mut v) = (Spectrum::of(&phi), Spectrum::of(&phi));
            b.iter(|| p.install(|| prop.apply(&mut a, &mut v)))
        });
        group.bench_with_input(BenchmarkId::new("measure_sweep", name), &pool, |b, p| {
            b.iter(|| p.install(|| measure_sweep_with_mc(&sweep, 11).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
