// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Byte accounting for every request and response crossing the listener.

use axum::body::{to_bytes, Body};
use axum::extract::{Request, State};
use axum::http::{HeaderMap, StatusCode};
use axum::middleware::Next;
use axum::response::{IntoResponse, Response};

use super::error::ApiError;
use super::AppState;

fn header_bytes(headers: &HeaderMap) -> u64 {
    headers
        .iter()
        .map(|(k, v)| (k.as_str().len() + 2 + v.len() + 2) as u64)
        .sum::<u64>()
        + 2
}

fn status_line_bytes(status: StatusCode) -> u64 {
    // "HTTP/1.1 200 OK\r\n"
    let reason = status.canonical_reason().unwrap_or("");
    (9 + 3 + 1 + reason.len() + 2) as u64
}

/// Buffers both bodies so their exact sizes can be counted, enforcing the
/// request body limit on the way in.
pub async fn meter(State(state): State<AppState>, req: Request, next: Next) -> Response {
    let meter = state.monitor().meter().clone();
    let (parts, body) = req.into_parts();
    let request_line = parts.method.as_str().len()
        + 1
        + parts.uri.path_and_query().map_or(1, |p| p.as_str().len())
        + 1
        + 8
        + 2;
    let head = request_line as u64 + header_bytes(&parts.headers);
    let limit = state.body_limit();
    let bytes = match to_bytes(body, limit).await {
        Ok(b) => b,
        Err(_) => {
            meter.record_rx(head);
            let resp = ApiError::too_large(state.config().execution.max_source_bytes).into_response();
            return count_response(&meter, resp).await;
        }
    };
    meter.record_rx(head + bytes.len() as u64);
    let resp = next.run(Request::from_parts(parts, Body::from(bytes))).await;
    count_response(&meter, resp).await
}

async fn count_response(meter: &crate::monitor::NetMeter, resp: Response) -> Response {
    let (parts, body) = resp.into_parts();
    let bytes = match to_bytes(body, usize::MAX).await {
        Ok(b) => b,
        Err(e) => {
            tracing::warn!(error = %e, "response body failed");
            return ApiError::internal("response body failed").into_response();
        }
    };
    meter.record_tx(status_line_bytes(parts.status) + header_bytes(&parts.headers) + bytes.len() as u64);
    Response::from_parts(parts, Body::from(bytes))
}
