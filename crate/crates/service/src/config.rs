// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Service configuration, loaded from TOML.
//!
//! ```toml
//! [server]
//! listen = "127.0.0.1:8080"
//!
//! [auth]
//! token_secret = "change-me-to-at-least-32-bytes-of-secret"
//!
//! [storage]
//! journal_path = "data/qgate.journal"
//! ```
//!
//! Every other key has a default. `QGATE_TOKEN_SECRET` in the environment
//! overrides `auth.token_secret`.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identity::policy::PolicyRule;

pub const TOKEN_SECRET_ENV: &str = "QGATE_TOKEN_SECRET";
pub const MIN_SECRET_BYTES: usize = 32;
pub const CLI_CLIENT_ID: &str = "qgate-cli";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Read { .. } => "ConfigUnreadable",
            ConfigError::Parse(_) | ConfigError::Invalid(_) => "InvalidConfig",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub server: ServerConfig,
    pub auth: AuthConfig,
    #[serde(default)]
    pub execution: ExecutionConfig,
    pub storage: StorageConfig,
    #[serde(default)]
    pub monitor: MonitorConfig,
    /// Replaces the default permission rules when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<Vec<PolicyRule>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerConfig {
    #[serde(default = "default_listen")]
    pub listen: SocketAddr,
    pub tls_cert: Option<PathBuf>,
    pub tls_key: Option<PathBuf>,
    /// Static front-end bundle served under `/`.
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            listen: default_listen(),
            tls_cert: None,
            tls_key: None,
            ui_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClientConfig {
    pub client_id: String,
    pub redirect_uri: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuthConfig {
    #[serde(default = "default_issuer")]
    pub issuer: String,
    #[serde(default)]
    pub token_secret: String,
    #[serde(default = "default_access_ttl")]
    pub access_ttl_s: u64,
    #[serde(default = "default_refresh_ttl")]
    pub refresh_ttl_s: u64,
    #[serde(default = "default_code_ttl")]
    pub code_ttl_s: u64,
    #[serde(default = "default_iterations")]
    pub pbkdf2_iterations: u32,
    /// Enables the resource-owner password grant (CLI and scripted tests).
    #[serde(default)]
    pub password_grant: bool,
    #[serde(default = "default_clients")]
    pub clients: Vec<ClientConfig>,
}

impl AuthConfig {
    pub fn new(token_secret: impl Into<String>) -> AuthConfig {
        AuthConfig {
            issuer: default_issuer(),
            token_secret: token_secret.into(),
            access_ttl_s: default_access_ttl(),
            refresh_ttl_s: default_refresh_ttl(),
            code_ttl_s: default_code_ttl(),
            pbkdf2_iterations: default_iterations(),
            password_grant: false,
            clients: default_clients(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExecutionConfig {
    /// Concurrent simulations; 0 means one per available core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_max_shots")]
    pub max_shots: u64,
    #[serde(default = "default_max_source")]
    pub max_source_bytes: usize,
    #[serde(default = "default_max_qubits")]
    pub max_qubits: usize,
}

impl Default for ExecutionConfig {
    fn default() -> Self {
        ExecutionConfig {
            workers: 0,
            max_shots: default_max_shots(),
            max_source_bytes: default_max_source(),
            max_qubits: default_max_qubits(),
        }
    }
}

impl ExecutionConfig {
    pub fn worker_count(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageConfig {
    pub journal_path: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorConfig {
    #[serde(default = "default_interval")]
    pub sample_interval_s: f64,
    #[serde(default = "default_ring")]
    pub ring_size: usize,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        MonitorConfig {
            sample_interval_s: default_interval(),
            ring_size: default_ring(),
        }
    }
}

impl MonitorConfig {
    pub fn interval(&self) -> Duration {
        Duration::from_secs_f64(self.sample_interval_s)
    }
}

fn default_listen() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 8080))
}
fn default_issuer() -> String {
    "qgate".into()
}
fn default_access_ttl() -> u64 {
    300
}
fn default_refresh_ttl() -> u64 {
    86_400
}
fn default_code_ttl() -> u64 {
    60
}
fn default_iterations() -> u32 {
    crate::identity::password::MIN_ITERATIONS
}
fn default_clients() -> Vec<ClientConfig> {
    vec![
        ClientConfig {
            client_id: "webui".into(),
            redirect_uri: "/callback".into(),
        },
        ClientConfig {
            client_id: CLI_CLIENT_ID.into(),
            redirect_uri: "urn:ietf:wg:oauth:2.0:oob".into(),
        },
    ]
}
fn default_max_shots() -> u64 {
    1_000_000
}
fn default_max_source() -> usize {
    1 << 20
}
fn default_max_qubits() -> usize {
    qgate_core::sim::DEFAULT_MAX_QUBITS
}
fn default_interval() -> f64 {
    5.0
}
fn default_ring() -> usize {
    720
}

impl Config {
    /// A complete configuration with defaults, for embedding and tests.
    pub fn new(token_secret: impl Into<String>, journal_path: impl Into<PathBuf>) -> Config {
        Config {
            server: ServerConfig::default(),
            auth: AuthConfig::new(token_secret),
            execution: ExecutionConfig::default(),
            storage: StorageConfig {
                journal_path: journal_path.into(),
            },
            monitor: MonitorConfig::default(),
            policy: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Config, ConfigError> {
        let mut config: Config = toml::from_str(text)?;
        if let Ok(secret) = std::env::var(TOKEN_SECRET_ENV) {
            if !secret.is_empty() {
                config.auth.token_secret = secret;
            }
        }
        config.validate()?;
        Ok(config)
    }

    /// Reads a file; relative journal and TLS paths resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        let mut config = Config::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut config.storage.journal_path);
        for p in [
            &mut config.server.tls_cert,
            &mut config.server.tls_key,
            &mut config.server.ui_dir,
        ]
        .into_iter()
        .flatten()
        {
            resolve(p);
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_owned()));
        if self.auth.token_secret.len() < MIN_SECRET_BYTES {
            return invalid("auth.token_secret must be at least 32 bytes (or set QGATE_TOKEN_SECRET)");
        }
        if self.auth.access_ttl_s == 0 || self.auth.refresh_ttl_s == 0 || self.auth.code_ttl_s == 0 {
            return invalid("token lifetimes must be positive");
        }
        if self.auth.pbkdf2_iterations < crate::identity::password::MIN_ITERATIONS {
            return invalid("auth.pbkdf2_iterations must be at least 100000");
        }
        if self.server.tls_cert.is_some() != self.server.tls_key.is_some() {
            return invalid("server.tls_cert and server.tls_key must be set together");
        }
        let mut ids: Vec<&str> = self.auth.clients.iter().map(|c| c.client_id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return invalid("auth.clients has duplicate client_id");
        }
        if self.execution.max_shots == 0 || self.execution.max_source_bytes == 0 {
            return invalid("execution caps must be positive");
        }
        if !(self.monitor.sample_interval_s.is_finite() && self.monitor.sample_interval_s > 0.0) {
            return invalid("monitor.sample_interval_s must be positive");
        }
        if self.monitor.ring_size == 0 {
            return invalid("monitor.ring_size must be positive");
        }
        Ok(())
    }
}
