// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Authenticated read endpoints and user administration.

use axum::body::{Body, Bytes};
use axum::extract::{Path, RawQuery, State};
use axum::http::header::{CONTENT_DISPOSITION, CONTENT_TYPE};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::{Extension, Json};
use serde::Deserialize;
use serde_json::json;

use super::auth::permit;
use super::error::ApiError;
use super::oauth::parse_form;
use super::AppState;
use crate::identity::policy::Action;
use crate::identity::token::Claims;
use crate::identity::{parse_group, parse_roles};
use crate::jobstore::{export_csv, StoredJob};

const DEFAULT_WINDOW_S: f64 = 300.0;

/// `GET /api/user/me`
pub async fn me(Extension(claims): Extension<Claims>) -> Response {
    Json(json!({
        "username": claims.preferred_username,
        "group": claims.group(),
        "roles": claims.roles,
    }))
    .into_response()
}

fn json_bytes(bytes: Vec<u8>) -> Response {
    ([(CONTENT_TYPE, HeaderValue::from_static("application/json"))], Body::from(bytes)).into_response()
}

/// `GET /api/qc/jobs?scope=own|all`: stored records, newest first.
pub async fn list_jobs(
    State(state): State<AppState>,
    Extension(claims): Extension<Claims>,
    RawQuery(query): RawQuery,
) -> Result<Response, ApiError> {
    let q = parse_form(query.unwrap_or_default().as_bytes());
    let jobs = match q.get("scope").map(String::as_str).unwrap_or("own") {
        "own" => {
            permit(&state, &claims, Action::ReadOwnJobs)?;
            state.store().list_jobs(Some(&claims.sub))
        }
        "all" => {
            permit(&state, &claims, Action::ReadAllJobs)?;
            state.store().list_jobs(None)
        }
        other => {
            return Err(ApiError::bad_request("InvalidScope", format!("scope must be own or all, got `{other}`")))
        }
    };
    let mut out = Vec::with_capacity(2 + jobs.iter().map(|j| j.raw.len() + 1).sum::<usize>());
    out.push(b'[');
    for (i, j) in jobs.iter().enumerate() {
        if i > 0 {
            out.push(b',');
        }
        out.extend_from_slice(&j.raw);
    }
    out.push(b']');
    Ok(json_bytes(out))
}

/// Foreign jobs look exactly like missing ones unless the caller may read all jobs.
fn visible_job(state: &AppState, claims: &Claims, id: &str) -> Result<StoredJob, ApiError> {
    let job = state.store().get_job(id).map_err(|_| ApiError::not_found())?;
    let own = job.record.owner == claims.sub && state.identity().check_permission(claims, Action::ReadOwnJobs);
    if own || state.identity().check_permission(claims, Action::ReadAllJobs) {
        Ok(job)
    } else {
        Err(ApiError::not_found())
    }
}

/// `GET /api/qc/jobs/{id}`: the stored record, byte for byte.
pub async fn get_job(
    State(state): State<AppState>,
    Extension(claims): Extension<Claims>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let job = visible_job(&state, &claims, &id)?;
    Ok(json_bytes(job.raw.to_vec()))
}

/// `GET /api/qc/jobs/{id}/result.csv`
pub async fn job_csv(
    State(state): State<AppState>,
    Extension(claims): Extension<Claims>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let job = visible_job(&state, &claims, &id)?;
    let csv = export_csv(&job.record.result)
        .map_err(|e| ApiError::new(StatusCode::CONFLICT, e.code(), e.to_string()))?;
    let disposition = HeaderValue::from_str(&format!("attachment; filename=\"{}.csv\"", job.record.job_id))
        .map_err(|_| ApiError::internal("job id is not a valid header value"))?;
    Ok((
        [
            (CONTENT_TYPE, HeaderValue::from_static("text/csv")),
            (CONTENT_DISPOSITION, disposition),
        ],
        csv,
    )
        .into_response())
}

/// `GET /api/monitor/stats?window_s=300`
pub async fn monitor_stats(
    State(state): State<AppState>,
    Extension(claims): Extension<Claims>,
    RawQuery(query): RawQuery,
) -> Result<Response, ApiError> {
    permit(&state, &claims, Action::ReadMonitor)?;
    let q = parse_form(query.unwrap_or_default().as_bytes());
    let window = match q.get("window_s") {
        None => DEFAULT_WINDOW_S,
        Some(v) => v
            .parse::<f64>()
            .ok()
            .filter(|w| w.is_finite() && *w > 0.0)
            .ok_or_else(|| ApiError::bad_request("InvalidWindow", "window_s must be a positive number"))?,
    };
    Ok(Json(state.monitor().window(window)).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewUser {
    username: String,
    password: String,
    group: String,
    roles: Vec<String>,
}

/// `POST /api/admin/users`
pub async fn create_user(
    State(state): State<AppState>,
    Extension(claims): Extension<Claims>,
    body: Bytes,
) -> Result<Response, ApiError> {
    permit(&state, &claims, Action::ManageUsers)?;
    let req: NewUser = serde_json::from_slice(&body)
        .map_err(|e| ApiError::bad_request("InvalidRequest", e.to_string()))?;
    let group = parse_group(&req.group)?;
    let roles = parse_roles(&req.roles)?;
    let s = state.clone();
    let view = tokio::task::spawn_blocking(move || s.identity().create_user(&req.username, &req.password, group, &roles))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

/// `GET /api/admin/users`
pub async fn list_users(State(state): State<AppState>, Extension(claims): Extension<Claims>) -> Result<Response, ApiError> {
    permit(&state, &claims, Action::ManageUsers)?;
    Ok(Json(state.identity().list_users()).into_response())
}
