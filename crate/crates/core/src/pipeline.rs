// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Source text to executable circuit, shared by the HTTP gateway and the
//! command-line runner so both produce the same job for the same input.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{bind_parameters, BindError, Bindings, Circuit};
use crate::compiler::{compile_program, peephole_optimize};
use crate::pauli::{parse_pauli_program, PauliParseError};
use crate::qasm::{emit_qasm, parse_qasm, QasmError};
use crate::sim::ProgramOrigin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    Qasm,
    Pauli,
}

impl SourceFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceFormat::Qasm => "qasm",
            SourceFormat::Pauli => "pauli",
        }
    }
}

impl std::str::FromStr for SourceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "qasm" => Ok(SourceFormat::Qasm),
            "pauli" => Ok(SourceFormat::Pauli),
            other => Err(format!("unknown format `{other}` (expected qasm or pauli)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrepareError {
    #[error(transparent)]
    Pauli(#[from] PauliParseError),
    #[error(transparent)]
    Qasm(#[from] QasmError),
    #[error(transparent)]
    Bind(#[from] BindError),
}

impl PrepareError {
    pub fn code(&self) -> &'static str {
        match self {
            PrepareError::Pauli(e) => e.kind.code(),
            PrepareError::Qasm(e) => e.kind.code(),
            PrepareError::Bind(e) => e.code(),
        }
    }

    /// `(line, column)` for syntax errors.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            PrepareError::Pauli(e) => Some((e.line, e.column)),
            PrepareError::Qasm(e) => Some((e.line, e.column)),
            PrepareError::Bind(_) => None,
        }
    }
}

/// A bound circuit ready for execution and the provenance echoed in its result.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub circuit: Circuit,
    pub origin: ProgramOrigin,
}

/// Parses and lowers a program without binding it.
pub fn build_circuit(format: SourceFormat, source: &str) -> Result<(Circuit, Vec<String>), PrepareError> {
    match format {
        SourceFormat::Qasm => Ok((parse_qasm(source)?, Vec::new())),
        SourceFormat::Pauli => {
            let program = parse_pauli_program(source)?;
            let warnings = program.validate().iter().map(ToString::to_string).collect();
            Ok((peephole_optimize(&compile_program(&program)), warnings))
        }
    }
}

/// Parses, lowers (Pauli), and binds. Pauli submissions carry the QASM text
/// of the bound circuit that is executed.
pub fn prepare(format: SourceFormat, source: &str, bindings: &Bindings) -> Result<Prepared, PrepareError> {
    let (circuit, warnings) = build_circuit(format, source)?;
    let circuit = bind_parameters(&circuit, bindings)?;
    let pauli = format == SourceFormat::Pauli;
    Ok(Prepared {
        origin: ProgramOrigin {
            source: source.to_owned(),
            generated_qasm: pauli.then(|| emit_qasm(&circuit)),
            warnings,
            measurements_appended: pauli && circuit.n_qubits() > 0,
        },
        circuit,
    })
}
