use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fwm_core::gaussian::{evolve, propagator, vacuum_state};
use fwm_core::geometry::{solve_four_mode_geometry, DispersionParams, PumpConfig};
use fwm_core::interaction::{gain_spectrum, hamiltonian_generator, CouplingGraph};
use fwm_core::metrics::log_negativity;
use fwm_core::oracle::fock_evolve;
use std::hint::black_box;

/// Ring of n modes with alternating rates, a stand-in for "typical"
/// coupling graphs at various sizes.
fn ring_graph(n: usize) -> CouplingGraph {
    let edges: Vec<(usize, usize, f64)> = (0..n)
        .map(|i| (i, (i + 1) % n, if i % 2 == 0 { 0.3 } else { 0.2 }))
        .collect();
    CouplingGraph::new(n, &edges).unwrap()
}

fn bench_propagator(c: &mut Criterion) {
    let mut group = c.benchmark_group("propagator");
    for n in [4usize, 8, 16, 32] {
        let gen = hamiltonian_generator(&ring_graph(n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &gen, |b, gen| {
            b.iter(|| propagator(black_box(gen), black_box(0.7)).unwrap())
        });
    }
    group.finish();
}

fn bench_evolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolve");
    for n in [4usize, 8, 16] {
        let gen = hamiltonian_generator(&ring_graph(n));
        let vac = vacuum_state(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| evolve(black_box(&vac), black_box(&gen), black_box(0.7)).unwrap())
        });
    }
    group.finish();
}

fn bench_gain_spectrum(c: &mut Criterion) {
    let graph = CouplingGraph::four_mode_symmetric(0.2, 0.1);
    c.bench_function("gain_spectrum_4mode", |b| {
        b.iter(|| gain_spectrum(black_box(&graph)).unwrap())
    });
}

fn bench_log_negativity(c: &mut Criterion) {
    let gen = hamiltonian_generator(&CouplingGraph::four_mode_symmetric(0.3, 0.2));
    let state = evolve(&vacuum_state(4), &gen, 1.0).unwrap();
    c.bench_function("log_negativity_4mode", |b| {
        b.iter(|| log_negativity(black_box(&state), black_box(&[0, 1])).unwrap())
    });
}

fn bench_geometry(c: &mut Criterion) {
    let pump = PumpConfig::default();
    let disp = DispersionParams::calibrated_default();
    c.bench_function("four_mode_layout", |b| {
        b.iter(|| solve_four_mode_geometry(black_box(&pump), black_box(&disp)).unwrap())
    });
}

fn bench_fock(c: &mut Criterion) {
    let graph = CouplingGraph::four_mode_symmetric(0.15, 0.1);
    let mut group = c.benchmark_group("fock_evolve");
    group.sample_size(10);
    for cutoff in [4usize, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(cutoff), &cutoff, |b, &cut| {
            b.iter(|| fock_evolve(black_box(&graph), black_box(0.5), cut).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_propagator,
    bench_evolve,
    bench_gain_spectrum,
    bench_log_negativity,
    bench_geometry,
    bench_fock
);
criterion_main!(benches);
