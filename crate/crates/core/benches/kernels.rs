//! Hot kernels on the rayon pool versus a single-worker pool. Build with
//! `--no-default-features` to bench the sequential fallback itself.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use torus_mhd::fields::{make_taylor, make_tilde_t1, Fft2, TaylorSpec, TorusGrid};
use torus_mhd::solver::{ForcingSpec, Integrator, MHDState, NonlinearTerm, SimConfig};
use torus_mhd::topology::{find_critical_points, TopologyConfig};
use torus_mhd::with_threads;

const POOLS: [(&str, Option<usize>); 2] = [("pool", None), ("one-thread", Some(1))];

fn t44_plus_tilde(m: usize) -> (torus_mhd::fields::SpectralField2D, torus_mhd::fields::SpectralField2D) {
    let g = TorusGrid::new(m).unwrap();
    let t = make_taylor(TaylorSpec::new(4, 4).unwrap(), 0.25, g).unwrap();
    let tilde = make_tilde_t1(g).unwrap();
    (tilde.scaled(0.3), t.combine(1.0, &tilde, 1e-3))
}

fn fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_pair_roundtrip");
    for m in [128, 256] {
        let (u, b) = t44_plus_tilde(m);
        let fft = Fft2::new(m);
        for (name, threads) in POOLS {
            group.bench_with_input(BenchmarkId::new(name, m), &m, |bench, _| {
                bench.iter(|| {
                    with_threads(threads, || {
                        let (f, g) = fft.to_grid_pair(u.component(0), b.component(1));
                        fft.from_grid_pair(&f, &g)
                    })
                    .unwrap()
                })
            });
        }
    }
    group.finish();
}

fn nonlinear(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonlinear_rhs");
    for m in [128, 256] {
        let (u, b) = t44_plus_tilde(m);
        let term = NonlinearTerm::new(u.grid(), true);
        for (name, threads) in POOLS {
            group.bench_with_input(BenchmarkId::new(name, m), &m, |bench, _| {
                bench.iter(|| with_threads(threads, || term.evaluate(&u, &b)).unwrap())
            });
        }
    }
    group.finish();
}

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("lawson_rk4_step");
    group.sample_size(20);
    let nm = TaylorSpec::new(4, 4).unwrap();
    let n2 = TaylorSpec::new(1, 1).unwrap();
    let cfg = SimConfig::new(0.5, 0.5, 128, 1e-3, 1.0).with_forcing(ForcingSpec::Theorem2 { nm, n2 });
    let (u, b) = t44_plus_tilde(128);
    for (name, threads) in POOLS {
        group.bench_function(BenchmarkId::new(name, 128), |bench| {
            let mut integ = Integrator::new(&cfg).unwrap();
            let mut state = MHDState::new(u.clone(), b.clone(), 0.0).unwrap();
            bench.iter(|| with_threads(threads, || integ.step_with(&mut state, 1e-3)).unwrap().unwrap())
        });
    }
    group.finish();
}

fn critical_points(c: &mut Criterion) {
    let mut group = c.benchmark_group("critical_points_t44");
    group.sample_size(20);
    let (_, b) = t44_plus_tilde(32);
    let topo = TopologyConfig::default();
    for (name, threads) in POOLS {
        group.bench_function(BenchmarkId::new(name, 32), |bench| {
            bench.iter(|| with_threads(threads, || find_critical_points(&b, &topo).unwrap()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(kernels, fft, nonlinear, step, critical_points);
criterion_main!(kernels);
