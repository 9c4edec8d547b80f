// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! `POST /api/qc/{qasm,pauli}/{code,upload}`: parse, lower, bind, execute,
//! and persist, returning the result synchronously.

use axum::body::Bytes;
use axum::extract::{FromRequest, Multipart, Request, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::{Extension, Json};
use chrono::Utc;
use qgate_core::circuit::Bindings;
use qgate_core::pipeline::{prepare, SourceFormat};
use qgate_core::sim::{execute, ExecutionRequest, NoiseSpec, ResultObject, DEFAULT_BACKEND};
use serde::Deserialize;
use serde_json::json;

use super::auth::permit;
use super::error::ApiError;
use super::AppState;
use crate::identity::policy::Action;
use crate::identity::token::Claims;
use crate::jobstore::{JobRecord, JobRequest};

pub const DEFAULT_SHOTS: u64 = 1024;

/// JSON body of the code endpoints.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmitBody {
    pub code: String,
    #[serde(default)]
    pub parameters: Option<Bindings>,
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub backend: Option<String>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
}

fn invalid(message: impl Into<String>) -> ApiError {
    ApiError::bad_request("InvalidRequest", message)
}

async fn read_multipart(req: Request, state: &AppState) -> Result<SubmitBody, ApiError> {
    let mut mp = Multipart::from_request(req, state)
        .await
        .map_err(|e| invalid(format!("expected a multipart/form-data body: {}", e.body_text())))?;
    let mut code = None;
    let mut body = SubmitBody {
        code: String::new(),
        parameters: None,
        shots: None,
        seed: None,
        backend: None,
        noise: None,
    };
    let limit = state.config().execution.max_source_bytes;
    while let Some(field) = mp.next_field().await.map_err(|e| {
        if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
            ApiError::too_large(limit)
        } else {
            invalid(e.body_text())
        }
    })? {
        let name = field.name().unwrap_or_default().to_owned();
        let text = field
            .text()
            .await
            .map_err(|e| invalid(format!("field `{name}`: {}", e.body_text())))?;
        let number = |t: &str| t.trim().parse::<u64>().map_err(|_| invalid(format!("field `{name}` must be a non-negative integer")));
        match name.as_str() {
            "file" | "code" => code = Some(text),
            "parameters" if text.trim().is_empty() => {}
            "parameters" => {
                body.parameters = Some(
                    serde_json::from_str(&text)
                        .map_err(|e| invalid(format!("parameters must be a JSON array or object: {e}")))?,
                )
            }
            "shots" => body.shots = Some(number(&text)?),
            "seed" if text.trim().is_empty() => {}
            "seed" => body.seed = Some(number(&text)?),
            "backend" => body.backend = Some(text.trim().to_owned()),
            "noise" => {
                body.noise =
                    Some(serde_json::from_str(&text).map_err(|e| invalid(format!("noise must be {{\"p1\":..,\"p2\":..}}: {e}")))?)
            }
            other => return Err(invalid(format!("unexpected field `{other}`"))),
        }
    }
    body.code = code.ok_or_else(|| invalid("missing `file` field"))?;
    Ok(body)
}

async fn read_json(req: Request) -> Result<SubmitBody, ApiError> {
    let bytes = Bytes::from_request(req, &())
        .await
        .map_err(|e| invalid(e.body_text()))?;
    serde_json::from_slice(&bytes).map_err(|e| invalid(format!("invalid JSON body: {e}")))
}

pub async fn submit(
    state: AppState,
    claims: Claims,
    format: SourceFormat,
    upload: bool,
    req: Request,
) -> Result<Response, ApiError> {
    permit(&state, &claims, Action::SubmitJob)?;
    let body = if upload {
        read_multipart(req, &state).await?
    } else {
        read_json(req).await?
    };
    let exec = &state.config().execution;
    if body.code.len() > exec.max_source_bytes {
        return Err(ApiError::too_large(exec.max_source_bytes));
    }
    let shots = body.shots.unwrap_or(DEFAULT_SHOTS);
    if shots == 0 || shots > exec.max_shots {
        return Err(ApiError::bad_request(
            "InvalidShots",
            format!("shots must be between 1 and {}", exec.max_shots),
        ));
    }
    let backend = body.backend.clone().unwrap_or_else(|| DEFAULT_BACKEND.to_owned());
    if backend != DEFAULT_BACKEND {
        return Err(ApiError::bad_request(
            "UnknownBackend",
            format!("unknown backend `{backend}`; available: {DEFAULT_BACKEND}"),
        ));
    }
    let noise = body.noise.unwrap_or_default();
    noise
        .validate()
        .map_err(|e| ApiError::bad_request(e.code(), e.to_string()))?;

    let permit = state
        .workers()
        .clone()
        .acquire_owned()
        .await
        .map_err(|_| ApiError::internal("worker pool closed"))?;
    let job_id = uuid::Uuid::new_v4().to_string();
    let s = state.clone();
    let owner = claims.sub.clone();
    let record = tokio::task::spawn_blocking(move || -> Result<JobRecord, ApiError> {
        let _permit = permit;
        let bindings = body.parameters.clone().unwrap_or_default();
        let prepared = prepare(format, &body.code, &bindings)?;
        let submitted_at = Utc::now();
        let result: ResultObject = execute(
            s.simulator(),
            ExecutionRequest {
                job_id: job_id.clone(),
                circuit: prepared.circuit,
                parameters: body.parameters.clone(),
                shots,
                seed: body.seed,
                noise,
                backend: backend.clone(),
            },
            prepared.origin,
        );
        let record = JobRecord {
            job_id,
            owner,
            submitted_at,
            input_format: format,
            request: JobRequest {
                source: body.code,
                parameters: body.parameters,
                shots,
                seed: body.seed,
                noise,
                backend,
            },
            result,
        };
        s.store().put_job(&record)?;
        Ok(record)
    })
    .await
    .map_err(|e| ApiError::internal(format!("worker failed: {e}")))??;

    if let Some(err) = &record.result.error {
        return Err(
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, err.code.clone(), err.message.clone())
                .with_detail(json!({ "job_id": record.job_id })),
        );
    }
    Ok(Json(record.result).into_response())
}

macro_rules! endpoint {
    ($name:ident, $format:expr, $upload:expr) => {
        pub async fn $name(State(state): State<AppState>, Extension(claims): Extension<Claims>, req: Request) -> Response {
            match submit(state, claims, $format, $upload, req).await {
                Ok(r) => r,
                Err(e) => e.into_response(),
            }
        }
    };
}

endpoint!(qasm_code, SourceFormat::Qasm, false);
endpoint!(qasm_upload, SourceFormat::Qasm, true);
endpoint!(pauli_code, SourceFormat::Pauli, false);
endpoint!(pauli_upload, SourceFormat::Pauli, true);
