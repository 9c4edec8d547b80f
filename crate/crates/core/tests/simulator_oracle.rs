// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

mod oracle;

use oracle::{clbit_distribution, max_deviation, random_circuit, total_variation, M};
use proptest::prelude::*;
use qgate_core::circuit::{Circuit, GateKind, GateOp};
use qgate_core::sim::{NoiseSpec, Simulator};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn unitary_matches_dense_model() {
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..40 {
        let n = rng.random_range(1..=5);
        let circuit = random_circuit(&mut rng, n, 25, false);
        let got = Simulator::default().unitary_of(&circuit).unwrap();
        assert!(max_deviation(&got, &oracle::unitary(&circuit)) < 1e-10);
    }
}

#[test]
fn sampling_fidelity_four_qubits() {
    let mut rng = StdRng::seed_from_u64(99);
    for k in 0..6 {
        let circuit = random_circuit(&mut rng, 4, 19, true);
        assert!(circuit.stats().depth <= 20);
        let counts = Simulator::default()
            .sample_counts(&circuit, 100_000, k, NoiseSpec::NONE)
            .unwrap();
        let tvd = total_variation(&counts, &clbit_distribution(&circuit));
        assert!(tvd < 0.02, "circuit {k}: tvd {tvd}");
    }
}

#[test]
fn partial_measurement_marginal() {
    let mut rng = StdRng::seed_from_u64(5);
    let base = random_circuit(&mut rng, 3, 15, false);
    let mut ops = base.ops().to_vec();
    ops.push(GateOp::measure(2, 0));
    ops.push(GateOp::measure(0, 1));
    let circuit = Circuit::from_ops(3, 2, ops).unwrap();
    let counts = Simulator::default().sample_counts(&circuit, 50_000, 3, NoiseSpec::NONE).unwrap();
    assert!(total_variation(&counts, &clbit_distribution(&circuit)) < 0.02);
}

#[test]
fn noisy_runs_are_reproducible() {
    let mut rng = StdRng::seed_from_u64(8);
    let circuit = random_circuit(&mut rng, 3, 12, true);
    let noise = NoiseSpec::new(0.02, 0.05).unwrap();
    let a = Simulator::sequential().sample_counts(&circuit, 3000, 4, noise).unwrap();
    let b = Simulator::default().sample_counts(&circuit, 3000, 4, noise).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.values().sum::<u64>(), 3000);
}

#[test]
fn noise_degrades_towards_uniform() {
    // cx with p2 = 1 on |00⟩: each wire gets X, Y or Z; X and Y flip, so each
    // bit reads 1 with probability 2/3 independently.
    let circuit = Circuit::from_ops(
        2,
        2,
        [GateOp::fixed(GateKind::Cx, &[0, 1]), GateOp::measure(0, 0), GateOp::measure(1, 1)],
    )
    .unwrap();
    let counts = Simulator::default()
        .sample_counts(&circuit, 40_000, 1, NoiseSpec::new(0.0, 1.0).unwrap())
        .unwrap();
    let p = |k: &str| counts.get(k).copied().unwrap_or(0) as f64 / 40_000.0;
    assert!((p("11") - 4.0 / 9.0).abs() < 0.02);
    assert!((p("00") - 1.0 / 9.0).abs() < 0.02);
}

#[test]
fn shots_split_across_streams_sum_exactly() {
    let circuit = random_circuit(&mut StdRng::seed_from_u64(3), 2, 6, true);
    for shots in [1u64, 8191, 8192, 8193, 100_003] {
        let counts = Simulator::default().sample_counts(&circuit, shots, 0, NoiseSpec::NONE).unwrap();
        assert_eq!(counts.values().sum::<u64>(), shots);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unitary_is_unitary(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.random_range(1..=5);
        let u = Simulator::default().unitary_of(&random_circuit(&mut rng, n, 20, false)).unwrap();
        let dim = u.nrows();
        prop_assert!(max_deviation(&(u.adjoint() * &u), &M::identity(dim, dim)) < 1e-9);
    }

    #[test]
    fn norm_is_preserved_after_every_gate(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.random_range(1..=6);
        let circuit = random_circuit(&mut rng, n, 20, false);
        for k in 0..=circuit.ops().len() {
            let prefix = Circuit::from_ops(n, 0, circuit.ops()[..k].to_vec()).unwrap();
            let s = Simulator::default().run_statevector(&prefix).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn seeded_counts_are_deterministic(seed in any::<u64>(), shots in 1u64..5000) {
        let mut rng = StdRng::seed_from_u64(seed);
        let circuit = random_circuit(&mut rng, 3, 10, true);
        let a = Simulator::sequential().sample_counts(&circuit, shots, seed, NoiseSpec::NONE).unwrap();
        let b = Simulator::default().sample_counts(&circuit, shots, seed, NoiseSpec::NONE).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.values().sum::<u64>(), shots);
        prop_assert!(a.keys().all(|k| k.len() == 3));
    }
}
