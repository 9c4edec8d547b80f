// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Blocking client for a running gateway.

use reqwest::blocking::{Client, RequestBuilder};
use reqwest::StatusCode;
use serde_json::Value;

use crate::error::{CliError, EXIT_HTTP, EXIT_PROGRAM};

pub struct Remote {
    base: String,
    token: Option<String>,
    http: Client,
}

impl Remote {
    pub fn new(url: &str, token: Option<String>) -> Result<Remote, CliError> {
        let http = Client::builder()
            .redirect(reqwest::redirect::Policy::none())
            .timeout(std::time::Duration::from_secs(600))
            .build()
            .map_err(|e| CliError::new(EXIT_HTTP, "HttpError", e.to_string()))?;
        Ok(Remote {
            base: url.trim_end_matches('/').to_owned(),
            token,
            http,
        })
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    fn send(&self, req: RequestBuilder) -> Result<Vec<u8>, CliError> {
        let req = match &self.token {
            Some(t) => req.bearer_auth(t),
            None => req,
        };
        let resp = req
            .send()
            .map_err(|e| CliError::new(EXIT_HTTP, "HttpError", format!("request to {} failed: {e}", self.base)))?;
        let status = resp.status();
        let body = resp
            .bytes()
            .map_err(|e| CliError::new(EXIT_HTTP, "HttpError", e.to_string()))?
            .to_vec();
        if status.is_success() {
            return Ok(body);
        }
        Err(status_error(status, &body))
    }

    pub fn get(&self, path: &str) -> Result<Vec<u8>, CliError> {
        self.send(self.http.get(self.url(path)))
    }

    pub fn post_json(&self, path: &str, body: &Value) -> Result<Vec<u8>, CliError> {
        self.send(self.http.post(self.url(path)).json(body))
    }

    pub fn post_form(&self, path: &str, form: &[(&str, &str)]) -> Result<Vec<u8>, CliError> {
        self.send(self.http.post(self.url(path)).form(form))
    }
}

/// Request-content errors exit like local program errors; everything else
/// (auth, missing resources, server faults) is an HTTP failure.
fn status_error(status: StatusCode, body: &[u8]) -> CliError {
    let exit = match status.as_u16() {
        400 | 409 | 413 | 422 => EXIT_PROGRAM,
        _ => EXIT_HTTP,
    };
    let parsed: Option<Value> = serde_json::from_slice(body).ok();
    let code = parsed
        .as_ref()
        .and_then(|v| v["error_code"].as_str())
        .unwrap_or("HttpError")
        .to_owned();
    let message = parsed
        .as_ref()
        .and_then(|v| v["message"].as_str())
        .map(str::to_owned)
        .unwrap_or_else(|| String::from_utf8_lossy(body).into_owned());
    CliError::new(exit, code, format!("HTTP {}: {message}", status.as_u16()))
}
