// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

use qgate_core::sim::{Counts, ResultObject};
use thiserror::Error;

pub const HEADER: &str = "bitstring,count";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsvError {
    #[error("job did not complete; no counts to export")]
    NotCompleted,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

impl CsvError {
    pub fn code(&self) -> &'static str {
        match self {
            CsvError::NotCompleted => "NotCompleted",
            CsvError::Malformed { .. } => "MalformedCsv",
        }
    }
}

/// `bitstring,count` header, then one row per outcome in key order.
pub fn export_csv(result: &ResultObject) -> Result<String, CsvError> {
    if !result.is_completed() {
        return Err(CsvError::NotCompleted);
    }
    Ok(counts_to_csv(&result.counts))
}

pub fn counts_to_csv(counts: &Counts) -> String {
    let mut out = String::with_capacity(HEADER.len() + 1 + counts.len() * 16);
    out.push_str(HEADER);
    out.push('\n');
    for (k, v) in counts {
        out.push_str(k);
        out.push(',');
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Counts, CsvError> {
    let bad = |line: usize, message: &str| CsvError::Malformed {
        line,
        message: message.to_owned(),
    };
    let body = text.strip_suffix('\n').ok_or_else(|| bad(1, "missing final newline"))?;
    let mut lines = body.split('\n');
    if lines.next() != Some(HEADER) {
        return Err(bad(1, "expected header `bitstring,count`"));
    }
    let mut counts = Counts::new();
    let mut prev: Option<&str> = None;
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let (key, value) = line.split_once(',').ok_or_else(|| bad(n, "expected two fields"))?;
        if !key.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(bad(n, "bitstring must contain only 0 and 1"));
        }
        if prev.is_some_and(|p| p >= key) {
            return Err(bad(n, "rows must be sorted and unique"));
        }
        if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) || (value.len() > 1 && value.starts_with('0')) {
            return Err(bad(n, "count must be a non-negative integer"));
        }
        let v = value.parse().map_err(|_| bad(n, "count out of range"))?;
        counts.insert(key.to_owned(), v);
        prev = Some(key);
    }
    Ok(counts)
}
