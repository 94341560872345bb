// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, Criterion};
use pulseprep::dynamics::Frame;
use pulseprep::{evolve, ProtocolKind, SolverConfig, StateVector};
use pulseprep_bench::reference_schedule;

fn bench_protocols(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolve");
    group.sample_size(10);
    for (kind, levels) in [(ProtocolKind::Bell, 2), (ProtocolKind::Ghz, 2), (ProtocolKind::W, 2), (ProtocolKind::Ghz, 3)] {
        let (device, schedule) = reference_schedule(kind, levels);
        let psi0 = StateVector::ground(device.dim());
        let cfg = SolverConfig::default();
        group.bench_function(format!("{kind}_L{levels}"), |b| {
            b.iter(|| evolve(&device, &schedule, &psi0, &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_frames(c: &mut Criterion) {
    let (device, schedule) = reference_schedule(ProtocolKind::Bell, 2);
    let psi0 = StateVector::ground(device.dim());
    let mut group = c.benchmark_group("frame");
    group.sample_size(10);
    for (name, cfg) in [
        ("interaction", SolverConfig::default()),
        ("interaction_no_shortcut", SolverConfig { periodic_shortcut: false, ..SolverConfig::default() }),
        ("lab", SolverConfig { frame: Frame::Lab, ..SolverConfig::default() }),
    ] {
        group.bench_function(name, |b| b.iter(|| evolve(&device, &schedule, &psi0, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_protocols, bench_frames);
criterion_main!(benches);
