// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qgate_core::circuit::{AngleExpr, Circuit, GateKind, GateOp};
use qgate_core::sim::{NoiseSpec, Simulator};

fn layered(n: usize, layers: usize) -> Circuit {
    let mut ops = Vec::new();
    for l in 0..layers {
        for q in 0..n {
            ops.push(GateOp::fixed(GateKind::H, &[q]));
            ops.push(GateOp::rotation(GateKind::Rz, q, AngleExpr::Num(0.1 * (l + q) as f64)).unwrap());
        }
        for q in 0..n - 1 {
            ops.push(GateOp::fixed(GateKind::Cx, &[q, q + 1]));
        }
    }
    ops.extend((0..n).map(|q| GateOp::measure(q, q)));
    Circuit::from_ops(n, n, ops).unwrap()
}

fn modes() -> Vec<(&'static str, Simulator)> {
    let mut v = vec![("sequential", Simulator::sequential())];
    if qgate_core::par::available() {
        v.push(("parallel", Simulator { parallel: true, ..Simulator::default() }));
    }
    v
}

fn statevector(c: &mut Criterion) {
    let mut g = c.benchmark_group("statevector");
    g.sample_size(10);
    for n in [12, 16, 18] {
        let circuit = layered(n, 4);
        for (name, sim) in modes() {
            g.bench_with_input(BenchmarkId::new(name, n), &circuit, |b, circ| {
                b.iter(|| sim.run_statevector(circ).unwrap())
            });
        }
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_counts");
    g.sample_size(10);
    let circuit = layered(10, 3);
    for (name, sim) in modes() {
        g.bench_function(BenchmarkId::new(name, "noiseless_1e6"), |b| {
            b.iter(|| sim.sample_counts(&circuit, 1_000_000, 7, NoiseSpec::NONE).unwrap())
        });
        g.bench_function(BenchmarkId::new(name, "noisy_2e3"), |b| {
            b.iter(|| sim.sample_counts(&circuit, 2_000, 7, NoiseSpec { p1: 0.01, p2: 0.02 }).unwrap())
        });
    }
    g.finish();
}

fn unitary(c: &mut Criterion) {
    let mut g = c.benchmark_group("unitary_of");
    g.sample_size(10);
    let circuit = layered(8, 3);
    for (name, sim) in modes() {
        g.bench_function(BenchmarkId::new(name, 8), |b| b.iter(|| sim.unitary_of(&circuit).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, statevector, sampling, unitary);
criterion_main!(benches);
