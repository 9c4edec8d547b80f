// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! `/auth/*`: authorization endpoint, login form handler, token endpoint.

use std::collections::HashMap;

use axum::body::Bytes;
use axum::extract::{RawQuery, State};
use axum::http::header::{ACCEPT, CACHE_CONTROL, LOCATION};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::Json;
use serde_json::json;

use super::error::ApiError;
use super::AppState;
use crate::identity::IdentityError;

pub fn parse_form(bytes: &[u8]) -> HashMap<String, String> {
    url::form_urlencoded::parse(bytes).into_owned().collect()
}

fn field<'a>(form: &'a HashMap<String, String>, name: &str) -> Result<&'a str, ApiError> {
    form.get(name)
        .map(String::as_str)
        .ok_or_else(|| ApiError::bad_request("InvalidRequest", format!("missing field `{name}`")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))
}

fn escape_html(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&#39;")
}

fn login_page(handle: &str) -> String {
    format!(
        r#"<!doctype html>
<html><head><meta charset="utf-8"><title>Sign in</title></head>
<body>
<form method="post" action="/auth/login">
<input type="hidden" name="handle" value="{}">
<label>Username <input name="username" autocomplete="username"></label>
<label>Password <input name="password" type="password" autocomplete="current-password"></label>
<button type="submit">Sign in</button>
</form>
</body></html>
"#,
        escape_html(handle)
    )
}

/// `GET /auth/authorize?response_type=code&client_id=..&redirect_uri=..&state=..`
pub async fn authorize(State(state): State<AppState>, headers: HeaderMap, RawQuery(query): RawQuery) -> Result<Response, ApiError> {
    let q = parse_form(query.unwrap_or_default().as_bytes());
    if let Some(rt) = q.get("response_type") {
        if rt != "code" {
            return Err(ApiError::bad_request("UnsupportedResponseType", "only response_type=code is supported"));
        }
    }
    let handle = state.identity().begin_authorization(
        field(&q, "client_id")?,
        field(&q, "redirect_uri")?,
        q.get("state").map(String::as_str),
    )?;
    let wants_json = headers
        .get(ACCEPT)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.contains("application/json"));
    Ok(if wants_json {
        Json(json!({ "login_handle": handle, "login_url": "/auth/login" })).into_response()
    } else {
        Html(login_page(&handle)).into_response()
    })
}

/// `POST /auth/login` (form: handle, username, password). Redirects to the
/// client with `code` and the original `state`.
pub async fn login(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let form = parse_form(&body);
    let handle = field(&form, "handle")?.to_owned();
    let username = field(&form, "username")?.to_owned();
    let password = field(&form, "password")?.to_owned();
    let identity = state.clone();
    let redirect = blocking(move || identity.identity().complete_login(&handle, &username, &password)).await??;
    let location = HeaderValue::from_str(&redirect.location())
        .map_err(|_| ApiError::internal("redirect is not a valid header value"))?;
    Ok((StatusCode::FOUND, [(LOCATION, location)]).into_response())
}

/// `POST /auth/token` (form-encoded).
pub async fn token(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let form = parse_form(&body);
    let grant = field(&form, "grant_type")?.to_owned();
    let s = state.clone();
    let tokens = match grant.as_str() {
        "authorization_code" => {
            let code = field(&form, "code")?.to_owned();
            let client = field(&form, "client_id")?.to_owned();
            let redirect = field(&form, "redirect_uri")?.to_owned();
            s.identity().exchange_code(&code, &client, &redirect)?
        }
        "refresh_token" => {
            let token = field(&form, "refresh_token")?.to_owned();
            s.identity().refresh(&token)?
        }
        "password" => {
            let username = field(&form, "username")?.to_owned();
            let password = field(&form, "password")?.to_owned();
            let client = field(&form, "client_id")?.to_owned();
            blocking(move || s.identity().password_login(&username, &password, &client)).await??
        }
        other => {
            return Err(ApiError::from(IdentityError::UnsupportedGrant)
                .with_detail(json!({ "grant_type": other })))
        }
    };
    Ok((
        [(CACHE_CONTROL, HeaderValue::from_static("no-store"))],
        Json(tokens),
    )
        .into_response())
}
