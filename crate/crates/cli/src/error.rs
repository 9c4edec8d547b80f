// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

pub const EXIT_PROGRAM: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_BIND: u8 = 3;
pub const EXIT_HTTP: u8 = 4;

/// Failure reported as `error_code: message` on the first stderr line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub exit: u8,
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn new(exit: u8, code: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError {
            exit,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn program(code: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::new(EXIT_PROGRAM, code, message)
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> CliError {
        CliError::program("IoError", format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Keep the diagnostic on one line.
        let message = self.message.replace('\n', " ");
        write!(f, "{}: {}", self.code, message)
    }
}

impl From<qgate_core::pipeline::PrepareError> for CliError {
    fn from(e: qgate_core::pipeline::PrepareError) -> Self {
        use qgate_core::pipeline::PrepareError;
        let message = match &e {
            PrepareError::Pauli(p) => format!("line {}, column {}: {}", p.line, p.column, p.message),
            PrepareError::Qasm(q) => format!("line {}, column {}: {}", q.line, q.column, q.message),
            PrepareError::Bind(b) => b.to_string(),
        };
        CliError::program(e.code(), message)
    }
}

impl From<qgate_service::config::ConfigError> for CliError {
    fn from(e: qgate_service::config::ConfigError) -> Self {
        CliError::new(EXIT_CONFIG, e.code(), e.to_string())
    }
}

impl From<qgate_service::identity::IdentityError> for CliError {
    fn from(e: qgate_service::identity::IdentityError) -> Self {
        CliError::program(e.code(), e.to_string())
    }
}

impl From<qgate_service::jobstore::StoreError> for CliError {
    fn from(e: qgate_service::jobstore::StoreError) -> Self {
        CliError::program(e.code(), e.to_string())
    }
}
