// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! `qgate run` and `qgate convert`.

use std::path::Path;

use qgate_core::circuit::{bind_parameters, Bindings};
use qgate_core::pipeline::{build_circuit, prepare, SourceFormat};
use qgate_core::qasm::emit_qasm;
use qgate_core::sim::{execute, ExecutionRequest, NoiseSpec, Simulator};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::remote::Remote;

pub struct RunInput {
    pub source: String,
    pub format: SourceFormat,
    pub shots: u64,
    pub params: Option<Bindings>,
    pub seed: Option<u64>,
    pub noise: NoiseSpec,
}

pub fn read_source(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_params(path: &Path) -> Result<Bindings, CliError> {
    let text = read_source(path)?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::program(
            "InvalidParameters",
            format!("{}: expected a JSON array or object of numbers: {e}", path.display()),
        )
    })
}

/// Format from the file extension: `.qasm` is OpenQASM, `.pauli` and `.txt`
/// are Pauli programs.
pub fn infer_format(path: &Path) -> Result<SourceFormat, CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("qasm") => Ok(SourceFormat::Qasm),
        Some("pauli") | Some("txt") => Ok(SourceFormat::Pauli),
        _ => Err(CliError::program(
            "UnknownFormat",
            format!("cannot infer the format of {}; pass --format qasm|pauli", path.display()),
        )),
    }
}

/// Job id derived from the inputs, so identical local runs print identical JSON.
pub fn local_job_id(input: &RunInput) -> String {
    let key = json!([
        input.format.as_str(),
        input.source,
        input.params,
        input.shots,
        input.seed,
        input.noise,
    ]);
    let digest = Sha256::digest(key.to_string().as_bytes());
    let hex: String = digest[..16].iter().map(|b| format!("{b:02x}")).collect();
    format!("local-{hex}")
}

/// Runs in-process. Wall time is reported as 0 unless `timing` is set.
pub fn run_local(input: RunInput, timing: bool) -> Result<String, CliError> {
    let bindings = input.params.clone().unwrap_or_default();
    let prepared = prepare(input.format, &input.source, &bindings)?;
    let job_id = local_job_id(&input);
    let mut result = execute(
        &Simulator::default(),
        ExecutionRequest {
            job_id,
            circuit: prepared.circuit,
            parameters: input.params,
            shots: input.shots,
            seed: input.seed,
            noise: input.noise,
            backend: qgate_core::sim::DEFAULT_BACKEND.to_owned(),
        },
        prepared.origin,
    );
    if let Some(err) = &result.error {
        return Err(CliError::program(err.code.clone(), err.message.clone()));
    }
    if !timing {
        result.metadata.wall_time_ms = 0;
    }
    Ok(serde_json::to_string(&result).expect("result serializes"))
}

pub fn run_remote(remote: &Remote, input: RunInput) -> Result<String, CliError> {
    let path = match input.format {
        SourceFormat::Qasm => "/api/qc/qasm/code",
        SourceFormat::Pauli => "/api/qc/pauli/code",
    };
    let mut body = json!({ "code": input.source, "shots": input.shots, "noise": input.noise });
    if let Some(p) = &input.params {
        body["parameters"] = json!(p);
    }
    if let Some(s) = input.seed {
        body["seed"] = json!(s);
    }
    let bytes = remote.post_json(path, &body)?;
    String::from_utf8(bytes).map_err(|_| CliError::new(crate::error::EXIT_HTTP, "HttpError", "response is not UTF-8"))
}

/// Lowers a Pauli program to OpenQASM, binding parameters when given.
pub fn convert(source: &str, params: Option<&Bindings>) -> Result<String, CliError> {
    let (circuit, _warnings) = build_circuit(SourceFormat::Pauli, source)?;
    let circuit = match params {
        Some(b) => bind_parameters(&circuit, b).map_err(qgate_core::pipeline::PrepareError::from)?,
        None => circuit,
    };
    Ok(emit_qasm(&circuit))
}
