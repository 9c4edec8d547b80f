// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

use axum::extract::{Request, State};
use axum::http::header::AUTHORIZATION;
use axum::http::HeaderMap;
use axum::middleware::Next;
use axum::response::{IntoResponse, Response};

use super::error::ApiError;
use super::AppState;
use crate::identity::policy::Action;
use crate::identity::token::Claims;

pub fn bearer(headers: &HeaderMap) -> Option<&str> {
    let value = headers.get(AUTHORIZATION)?.to_str().ok()?;
    let (scheme, token) = value.split_once(' ')?;
    scheme.eq_ignore_ascii_case("bearer").then(|| token.trim()).filter(|t| !t.is_empty())
}

/// Rejects requests without a valid access token; otherwise attaches the
/// token's claims for handlers.
pub async fn require_token(State(state): State<AppState>, mut req: Request, next: Next) -> Response {
    let Some(token) = bearer(req.headers()) else {
        return ApiError::unauthorized("MissingToken", "a bearer access token is required").into_response();
    };
    match state.identity().validate_access_token(token) {
        Ok(claims) => {
            req.extensions_mut().insert(claims);
            next.run(req).await
        }
        Err(e) => ApiError::unauthorized(e.code(), e.to_string()).into_response(),
    }
}

pub fn permit(state: &AppState, claims: &Claims, action: Action) -> Result<(), ApiError> {
    if state.identity().check_permission(claims, action) {
        Ok(())
    } else {
        Err(ApiError::forbidden(action.as_str()))
    }
}
