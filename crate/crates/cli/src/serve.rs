// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use qgate_service::config::Config;
use qgate_service::gateway::{shutdown_signal, Gateway, StartError};

use crate::error::{CliError, EXIT_BIND, EXIT_PROGRAM};

fn start_error(e: StartError) -> CliError {
    match e {
        StartError::Bind { .. } => CliError::new(EXIT_BIND, "BindFailed", e.to_string()),
        StartError::Store(s) => CliError::new(EXIT_PROGRAM, s.code(), s.to_string()),
        StartError::Tls(_) => CliError::new(EXIT_PROGRAM, "TlsSetupFailed", e.to_string()),
        StartError::Serve(_) => CliError::new(EXIT_PROGRAM, "ServeFailed", e.to_string()),
    }
}

/// Runs the gateway until SIGINT or SIGTERM.
pub fn serve(config_path: &Path) -> Result<(), CliError> {
    let config = Config::load(config_path)?;
    let tls = config.server.tls_cert.is_some();
    let gateway = Gateway::open(config).map_err(start_error)?;
    let listener = gateway.bind().map_err(start_error)?;
    let addr = listener.local_addr().map_err(|e| CliError::new(EXIT_BIND, "BindFailed", e.to_string()))?;
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    println!("qgate listening on {}://{addr}", if tls { "https" } else { "http" });
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::program("RuntimeFailed", e.to_string()))?;
    runtime.block_on(gateway.serve(listener, shutdown_signal())).map_err(start_error)
}
