use std::hint::black_box;

use bellgen_core::classical::{classical_chsh_max, ClassicalModel};
use bellgen_core::correlation::{pair_correlation_frames, reference_frame_average};
use bellgen_core::montecarlo::{ensemble_correlation_at, trial_rng};
use bellgen_core::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn generators(c: &mut Criterion) {
    let mut rng = trial_rng(1, 0);
    let photon = produce_pair::<Photon, _>(&mut rng);
    let spin = produce_pair::<SpinHalf, _>(&mut rng);
    let (pa, pb) = (Photon::direction(0.3), Photon::direction(1.1));
    let (sa, sb) = (SpinHalf::direction(0.3), SpinHalf::direction(1.1));

    let mut g = c.benchmark_group("pair_correlation_frames");
    g.bench_function("photon", |b| {
        b.iter(|| pair_correlation_frames::<Photon>(black_box(&pa), &photon.frame_1, black_box(&pb), &photon.frame_2))
    });
    g.bench_function("spin", |b| {
        b.iter(|| pair_correlation_frames::<SpinHalf>(black_box(&sa), &spin.frame_1, black_box(&sb), &spin.frame_2))
    });
    g.finish();
}

fn ensembles(c: &mut Criterion) {
    let mut g = c.benchmark_group("ensemble_correlation");
    g.sample_size(10);
    for kind in [ParticleKind::Photon, ParticleKind::SpinHalf] {
        g.bench_with_input(BenchmarkId::new(kind.name(), 100_000), &kind, |b, &kind| {
            b.iter(|| ensemble_correlation_at(kind, 0.4, 0.0, 100_000, black_box(7)).unwrap())
        });
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("reference_frame_average");
    g.bench_function("photon_256", |b| {
        b.iter(|| reference_frame_average(ParticleKind::Photon, black_box(0.5), 0.0, 256).unwrap())
    });
    g.bench_function("spin_10000", |b| {
        b.iter(|| reference_frame_average(ParticleKind::SpinHalf, black_box(0.5), 0.0, 10_000).unwrap())
    });
    g.finish();
}

fn chsh_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("classical_chsh_max");
    g.sample_size(10);
    g.bench_function("photon_sign", |b| {
        b.iter(|| classical_chsh_max(black_box(ParticleKind::Photon), ClassicalModel::DeterministicSign))
    });
    g.finish();
}

criterion_group!(benches, generators, ensembles, quadrature, chsh_search);
criterion_main!(benches);
