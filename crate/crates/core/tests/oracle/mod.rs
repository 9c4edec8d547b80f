// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense-matrix reference model used by tests. Gate matrices are written out
//! from their textbook definitions and embedded with Kronecker products, so
//! nothing here shares code with the statevector kernels.

#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use qgate_core::circuit::{AngleExpr, Circuit, GateKind, GateOp};
use rand::rngs::StdRng;
use rand::Rng;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn m2(a: Complex64, b: Complex64, d: Complex64, e: Complex64) -> M {
    M::from_row_slice(2, 2, &[a, b, d, e])
}

pub fn pauli(ch: char) -> M {
    match ch {
        'I' => m2(c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)),
        'X' => m2(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)),
        'Y' => m2(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)),
        'Z' => m2(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)),
        _ => panic!("not a pauli: {ch}"),
    }
}

/// Operator for a Pauli string whose character `k` acts on qubit `k`, with
/// qubit 0 the least significant index bit: `P_{n-1} ⊗ … ⊗ P_0`.
pub fn pauli_string(ops: &str) -> M {
    ops.chars()
        .rev()
        .fold(M::identity(1, 1), |acc, ch| acc.kronecker(&pauli(ch)))
}

/// `exp(-i·φ·P) = cos φ·I − i·sin φ·P` with `φ = c·θ/2`.
pub fn rotation(ops: &str, coefficient: f64, theta: f64) -> M {
    let phi = coefficient * theta / 2.0;
    let p = pauli_string(ops);
    let dim = p.nrows();
    M::identity(dim, dim) * c(phi.cos(), 0.0) - p * c(0.0, phi.sin())
}

pub fn gate(kind: GateKind, a: &[f64]) -> M {
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0., 0.);
    let one = c(1., 0.);
    match kind {
        GateKind::H => m2(c(r, 0.), c(r, 0.), c(r, 0.), c(-r, 0.)),
        GateKind::X => pauli('X'),
        GateKind::Y => pauli('Y'),
        GateKind::Z => pauli('Z'),
        GateKind::S => m2(one, z, z, c(0., 1.)),
        GateKind::Sdg => m2(one, z, z, c(0., -1.)),
        GateKind::T => m2(one, z, z, e(std::f64::consts::FRAC_PI_4)),
        GateKind::Tdg => m2(one, z, z, e(-std::f64::consts::FRAC_PI_4)),
        GateKind::Rx => {
            let (co, si) = ((a[0] / 2.).cos(), (a[0] / 2.).sin());
            m2(c(co, 0.), c(0., -si), c(0., -si), c(co, 0.))
        }
        GateKind::Ry => {
            let (co, si) = ((a[0] / 2.).cos(), (a[0] / 2.).sin());
            m2(c(co, 0.), c(-si, 0.), c(si, 0.), c(co, 0.))
        }
        GateKind::Rz => m2(e(-a[0] / 2.), z, z, e(a[0] / 2.)),
        GateKind::U1 => m2(one, z, z, e(a[0])),
        GateKind::U2 => {
            let (phi, lam) = (a[0], a[1]);
            m2(c(r, 0.), -e(lam) * r, e(phi) * r, e(phi + lam) * r)
        }
        GateKind::U3 => {
            let (th, phi, lam) = (a[0], a[1], a[2]);
            let (co, si) = ((th / 2.).cos(), (th / 2.).sin());
            m2(c(co, 0.), -e(lam) * si, e(phi) * si, e(phi + lam) * co)
        }
        other => panic!("no 1q matrix for {other}"),
    }
}

/// `I_{2^(n-1-q)} ⊗ g ⊗ I_{2^q}`.
pub fn embed(n: usize, q: usize, g: &M) -> M {
    let hi = M::identity(1 << (n - 1 - q), 1 << (n - 1 - q));
    let lo = M::identity(1 << q, 1 << q);
    hi.kronecker(g).kronecker(&lo)
}

/// CNOT as a permutation of basis indices.
pub fn cnot(n: usize, control: usize, target: usize) -> M {
    let dim = 1 << n;
    let mut m = M::zeros(dim, dim);
    for j in 0..dim {
        let i = if j >> control & 1 == 1 { j ^ (1 << target) } else { j };
        m[(i, j)] = c(1., 0.);
    }
    m
}

pub fn op_matrix(n: usize, op: &GateOp) -> Option<M> {
    match op.kind() {
        GateKind::Measure | GateKind::Barrier => None,
        GateKind::Cx => Some(cnot(n, op.qubits()[0], op.qubits()[1])),
        kind => {
            let angles: Vec<f64> = op.params().iter().map(|p| p.eval().unwrap()).collect();
            Some(embed(n, op.qubits()[0], &gate(kind, &angles)))
        }
    }
}

pub fn unitary(circuit: &Circuit) -> M {
    let n = circuit.n_qubits();
    let dim = 1 << n;
    circuit
        .ops()
        .iter()
        .filter_map(|op| op_matrix(n, op))
        .fold(M::identity(dim, dim), |acc, g| g * acc)
}

/// Largest elementwise deviation after aligning global phase.
pub fn deviation_up_to_phase(a: &M, b: &M) -> f64 {
    let (mut best, mut idx) = (0.0, (0, 0));
    for i in 0..b.nrows() {
        for j in 0..b.ncols() {
            if b[(i, j)].norm() > best {
                best = b[(i, j)].norm();
                idx = (i, j);
            }
        }
    }
    let ratio = a[idx] / b[idx];
    let phase = ratio / ratio.norm();
    (a - b * phase).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_deviation(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Exact distribution over clbit strings for a circuit whose measurements are
/// terminal. Unwritten clbits read 0; a later measure into the same clbit wins.
pub fn clbit_distribution(circuit: &Circuit) -> BTreeMap<String, f64> {
    let u = unitary(circuit);
    let mut source: Vec<Option<usize>> = vec![None; circuit.n_clbits()];
    for op in circuit.ops() {
        if op.kind() == GateKind::Measure {
            source[op.clbits()[0]] = Some(op.qubits()[0]);
        }
    }
    let mut dist = BTreeMap::new();
    for idx in 0..u.nrows() {
        let p = u[(idx, 0)].norm_sqr();
        let key: String = source
            .iter()
            .map(|s| match s {
                Some(q) if idx >> q & 1 == 1 => '1',
                _ => '0',
            })
            .collect();
        *dist.entry(key).or_insert(0.0) += p;
    }
    dist
}

pub fn total_variation(counts: &BTreeMap<String, u64>, dist: &BTreeMap<String, f64>) -> f64 {
    let shots: u64 = counts.values().sum();
    let mut keys: Vec<&String> = counts.keys().chain(dist.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| {
            let emp = counts.get(k).copied().unwrap_or(0) as f64 / shots as f64;
            (emp - dist.get(k).copied().unwrap_or(0.0)).abs()
        })
        .sum::<f64>()
}

const ONE_QUBIT: [GateKind; 14] = [
    GateKind::H,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::S,
    GateKind::Sdg,
    GateKind::T,
    GateKind::Tdg,
    GateKind::Rx,
    GateKind::Ry,
    GateKind::Rz,
    GateKind::U1,
    GateKind::U2,
    GateKind::U3,
];

pub fn random_op(rng: &mut StdRng, n: usize) -> GateOp {
    if n > 1 && rng.random_bool(0.3) {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        return GateOp::fixed(GateKind::Cx, &[a, b]);
    }
    let kind = ONE_QUBIT[rng.random_range(0..ONE_QUBIT.len())];
    let params = (0..kind.param_arity())
        .map(|_| AngleExpr::Num(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
        .collect();
    GateOp::new(kind, vec![rng.random_range(0..n)], params).unwrap()
}

/// Random bound circuit with exactly `gates` unitary ops, optionally followed
/// by a measurement of every qubit into the clbit of the same index.
pub fn random_circuit(rng: &mut StdRng, n: usize, gates: usize, measure: bool) -> Circuit {
    let mut ops: Vec<GateOp> = (0..gates).map(|_| random_op(rng, n)).collect();
    if measure {
        ops.extend((0..n).map(|q| GateOp::measure(q, q)));
    }
    Circuit::from_ops(n, if measure { n } else { 0 }, ops).unwrap()
}

pub fn random_pauli_string(rng: &mut StdRng, n: usize) -> String {
    loop {
        let s: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
        if s.chars().any(|ch| ch != 'I') {
            return s;
        }
    }
}
