// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Lowering of Pauli rotation programs to gate circuits.
//!
//! A term `(P, c, θ)` becomes `exp(-i·(c·θ)/2·P)`: rotate every active qubit
//! into the Z basis, fold their parity onto the highest active qubit with a
//! CNOT ladder, apply `rz(c·θ)` there, then undo the ladder and the basis
//! changes. A single-qubit `Z` term is therefore exactly `rz(c·θ)`.

use crate::circuit::{AngleExpr, Circuit, GateKind, GateOp, ParamName};
use crate::pauli::{Pauli, PauliProgram, PauliTerm};

/// Gate kinds emitted by [`compile_program`].
pub const NATIVE_GATES: [GateKind; 6] = [
    GateKind::H,
    GateKind::S,
    GateKind::Sdg,
    GateKind::Rz,
    GateKind::Cx,
    GateKind::Measure,
];

fn rotation_angle(term: &PauliTerm) -> AngleExpr {
    match term.parameter() {
        Some(name) => AngleExpr::mul(
            AngleExpr::Num(term.coefficient()),
            AngleExpr::Param(ParamName::new(name).expect("pauli parameter names are valid")),
        ),
        None => AngleExpr::Num(term.coefficient()),
    }
}

/// Gate sequence for one term. An all-identity term yields nothing.
///
/// Panics if `term.width() != n_qubits`.
pub fn lower_pauli_term(term: &PauliTerm, n_qubits: usize) -> Vec<GateOp> {
    assert_eq!(term.width(), n_qubits, "term width must match the register");
    let active: Vec<(usize, Pauli)> = term.active_qubits().collect();
    let Some(&(target, _)) = active.last() else {
        return Vec::new();
    };
    let h = |q| GateOp::fixed(GateKind::H, &[q]);
    let mut ops = Vec::with_capacity(4 * active.len() + 1);

    for &(q, p) in &active {
        match p {
            Pauli::X => ops.push(h(q)),
            Pauli::Y => {
                ops.push(GateOp::fixed(GateKind::Sdg, &[q]));
                ops.push(h(q));
            }
            Pauli::Z | Pauli::I => {}
        }
    }
    for &(q, _) in &active[..active.len() - 1] {
        ops.push(GateOp::fixed(GateKind::Cx, &[q, target]));
    }
    ops.push(
        GateOp::rotation(GateKind::Rz, target, rotation_angle(term)).expect("rz takes one angle"),
    );
    for &(q, _) in active[..active.len() - 1].iter().rev() {
        ops.push(GateOp::fixed(GateKind::Cx, &[q, target]));
    }
    for &(q, p) in active.iter().rev() {
        match p {
            Pauli::X => ops.push(h(q)),
            Pauli::Y => {
                ops.push(h(q));
                ops.push(GateOp::fixed(GateKind::S, &[q]));
            }
            Pauli::Z | Pauli::I => {}
        }
    }
    ops
}

/// Concatenates the lowered terms in source order and appends a terminal
/// measurement of every qubit into the classical bit of the same index.
pub fn compile_program(program: &PauliProgram) -> Circuit {
    let n = program.n_qubits();
    let mut circuit = Circuit::new(n, n);
    let lowered = program
        .terms()
        .iter()
        .flat_map(|t| lower_pauli_term(t, n))
        .chain((0..n).map(|q| GateOp::measure(q, q)));
    for op in lowered {
        circuit.push(op).expect("lowered operands are in range");
    }
    circuit
}

fn cancels(a: &GateOp, b: &GateOp) -> bool {
    use GateKind::*;
    if a.qubits() != b.qubits() {
        return false;
    }
    matches!(
        (a.kind(), b.kind()),
        (H, H) | (X, X) | (Y, Y) | (Z, Z) | (Cx, Cx) | (S, Sdg) | (Sdg, S) | (T, Tdg) | (Tdg, T)
    )
}

/// One rewrite, if any applies. Returns whether the op list changed.
fn rewrite_once(ops: &mut Vec<GateOp>) -> bool {
    for i in 0..ops.len() {
        let a = &ops[i];
        if !a.kind().is_unitary() {
            continue;
        }
        // The next op on any of `a`'s wires; for a pair that must also be the
        // next op on every other wire, which holds since we stop at the first.
        let Some(j) = (i + 1..ops.len()).find(|&j| ops[j].qubits().iter().any(|q| a.qubits().contains(q)))
        else {
            continue;
        };
        let b = &ops[j];
        if cancels(a, b) {
            ops.remove(j);
            ops.remove(i);
            return true;
        }
        if a.kind() == GateKind::Rz && b.kind() == GateKind::Rz && a.qubits() == b.qubits() {
            let sum = AngleExpr::add(a.params()[0].clone(), b.params()[0].clone());
            let merged = GateOp::rotation(GateKind::Rz, a.qubits()[0], sum).expect("rz arity");
            ops[i] = merged;
            ops.remove(j);
            return true;
        }
    }
    false
}

/// Cancels adjacent inverse pairs and merges adjacent `rz` on the same wire
/// until nothing changes. Measurements and barriers block both rewrites.
pub fn peephole_optimize(circuit: &Circuit) -> Circuit {
    let mut ops = circuit.ops().to_vec();
    while rewrite_once(&mut ops) {}
    Circuit::from_ops(circuit.n_qubits(), circuit.n_clbits(), ops)
        .expect("rewrites keep operand indices")
}
