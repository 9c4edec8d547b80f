// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Program representations, Pauli-exponential lowering, and a seeded
//! statevector backend.

pub mod circuit;
pub mod compiler;
pub mod par;
pub mod pauli;
pub mod pipeline;
pub mod qasm;
pub mod sim;

pub use circuit::{bind_parameters, circuit_stats, AngleExpr, Bindings, Circuit, GateKind, GateOp, ParamName};
pub use compiler::{compile_program, lower_pauli_term, peephole_optimize};
pub use pauli::{parse_pauli_program, Pauli, PauliProgram, PauliTerm};
pub use qasm::{emit_qasm, parse_qasm};
pub use sim::{execute, NoiseSpec, ResultObject, Simulator};
