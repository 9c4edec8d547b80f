// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! The HTTP entry point: routing, authentication, job orchestration, and
//! monitoring exposure on one listener.

pub mod api;
pub mod auth;
pub mod error;
pub mod meter;
pub mod oauth;
pub mod submit;

use std::future::Future;
use std::net::{SocketAddr, TcpListener};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::DefaultBodyLimit;
use axum::middleware::from_fn_with_state;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::Router;
use qgate_core::sim::Simulator;
use thiserror::Error;
use tokio::sync::Semaphore;
use tower_http::services::{ServeDir, ServeFile};

use crate::config::Config;
use crate::identity::policy::Policy;
use crate::identity::{Clock, Identity, SystemClock};
use crate::jobstore::{JobStore, StoreError};
use crate::monitor::{Monitor, NetMeter};
use error::ApiError;

/// Every `/api` route, all behind the token middleware.
pub const API_ROUTES: &[(&str, &str)] = &[
    ("GET", "/api/user/me"),
    ("POST", "/api/qc/qasm/code"),
    ("POST", "/api/qc/qasm/upload"),
    ("POST", "/api/qc/pauli/code"),
    ("POST", "/api/qc/pauli/upload"),
    ("GET", "/api/qc/jobs"),
    ("GET", "/api/qc/jobs/{id}"),
    ("GET", "/api/qc/jobs/{id}/result.csv"),
    ("GET", "/api/monitor/stats"),
    ("POST", "/api/admin/users"),
    ("GET", "/api/admin/users"),
];

pub const AUTH_ROUTES: &[(&str, &str)] = &[
    ("GET", "/auth/authorize"),
    ("POST", "/auth/login"),
    ("POST", "/auth/token"),
];

struct Inner {
    config: Config,
    identity: Identity,
    store: Arc<JobStore>,
    monitor: Monitor,
    simulator: Simulator,
    workers: Arc<Semaphore>,
}

/// Shared handler state.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn config(&self) -> &Config {
        &self.0.config
    }

    pub fn identity(&self) -> &Identity {
        &self.0.identity
    }

    pub fn store(&self) -> &Arc<JobStore> {
        &self.0.store
    }

    pub fn monitor(&self) -> &Monitor {
        &self.0.monitor
    }

    pub fn simulator(&self) -> &Simulator {
        &self.0.simulator
    }

    pub fn workers(&self) -> &Arc<Semaphore> {
        &self.0.workers
    }

    /// Largest request body accepted; JSON escaping can inflate the source.
    pub fn body_limit(&self) -> usize {
        self.config().execution.max_source_bytes.saturating_mul(8).saturating_add(64 << 10)
    }
}

#[derive(Debug, Error)]
pub enum StartError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
    #[error("TLS setup failed: {0}")]
    Tls(std::io::Error),
    #[error("server error: {0}")]
    Serve(std::io::Error),
}

pub struct Gateway {
    state: AppState,
}

impl Gateway {
    /// Opens the journal named in the config and wires all services.
    pub fn open(config: Config) -> Result<Gateway, StartError> {
        let store = Arc::new(JobStore::open(&config.storage.journal_path)?);
        Ok(Gateway::with_store(config, store, Arc::new(SystemClock)))
    }

    pub fn with_store(config: Config, store: Arc<JobStore>, clock: Arc<dyn Clock>) -> Gateway {
        let policy = config.policy.clone().map(Policy::new).unwrap_or_default();
        let identity = Identity::new(store.clone(), &config.auth, policy, clock);
        let monitor = Monitor::new(config.monitor.ring_size, Arc::new(NetMeter::default()));
        let simulator = Simulator {
            max_qubits: config.execution.max_qubits,
            ..Simulator::default()
        };
        let workers = Arc::new(Semaphore::new(config.execution.worker_count()));
        Gateway {
            state: AppState(Arc::new(Inner {
                config,
                identity,
                store,
                monitor,
                simulator,
                workers,
            })),
        }
    }

    pub fn state(&self) -> &AppState {
        &self.state
    }

    pub fn router(&self) -> Router {
        let state = self.state.clone();
        let api = Router::new()
            .route("/api/user/me", get(api::me))
            .route("/api/qc/qasm/code", post(submit::qasm_code))
            .route("/api/qc/qasm/upload", post(submit::qasm_upload))
            .route("/api/qc/pauli/code", post(submit::pauli_code))
            .route("/api/qc/pauli/upload", post(submit::pauli_upload))
            .route("/api/qc/jobs", get(api::list_jobs))
            .route("/api/qc/jobs/{id}", get(api::get_job))
            .route("/api/qc/jobs/{id}/result.csv", get(api::job_csv))
            .route("/api/monitor/stats", get(api::monitor_stats))
            .route("/api/admin/users", post(api::create_user).get(api::list_users))
            .route_layer(from_fn_with_state(state.clone(), auth::require_token));
        let auth = Router::new()
            .route("/auth/authorize", get(oauth::authorize))
            .route("/auth/login", post(oauth::login))
            .route("/auth/token", post(oauth::token));
        let mut app = Router::new().merge(api).merge(auth);
        app = match &state.config().server.ui_dir {
            Some(dir) => app.fallback_service(
                ServeDir::new(dir).fallback(ServeFile::new(dir.join("index.html"))),
            ),
            None => app.fallback(|| async { ApiError::not_found().into_response() }),
        };
        app.layer(DefaultBodyLimit::max(state.body_limit()))
            .layer(from_fn_with_state(state.clone(), meter::meter))
            .with_state(state)
    }

    /// Records one monitor sample per interval until dropped.
    pub fn spawn_sampler(&self) -> tokio::task::JoinHandle<()> {
        let state = self.state.clone();
        let period = state.config().monitor.interval();
        tokio::spawn(async move {
            let mut ticker = tokio::time::interval(period);
            ticker.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
            loop {
                ticker.tick().await;
                state.monitor().tick();
            }
        })
    }

    /// Binds the configured address without serving yet.
    pub fn bind(&self) -> Result<TcpListener, StartError> {
        let addr = self.state.config().server.listen;
        let listener = TcpListener::bind(addr).map_err(|source| StartError::Bind { addr, source })?;
        listener.set_nonblocking(true).map_err(|source| StartError::Bind { addr, source })?;
        Ok(listener)
    }

    /// Serves until `shutdown` resolves, then drains in-flight requests.
    pub async fn serve(self, listener: TcpListener, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), StartError> {
        let sampler = self.spawn_sampler();
        let router = self.router();
        let server = &self.state.config().server;
        let result = match (&server.tls_cert, &server.tls_key) {
            (Some(cert), Some(key)) => {
                let _ = rustls::crypto::ring::default_provider().install_default();
                let tls = axum_server::tls_rustls::RustlsConfig::from_pem_file(cert, key)
                    .await
                    .map_err(StartError::Tls)?;
                let handle = axum_server::Handle::new();
                let h = handle.clone();
                tokio::spawn(async move {
                    shutdown.await;
                    h.graceful_shutdown(Some(Duration::from_secs(30)));
                });
                axum_server::from_tcp_rustls(listener, tls)
                    .handle(handle)
                    .serve(router.into_make_service())
                    .await
                    .map_err(StartError::Serve)
            }
            _ => {
                let listener = tokio::net::TcpListener::from_std(listener).map_err(StartError::Serve)?;
                axum::serve(listener, router)
                    .with_graceful_shutdown(shutdown)
                    .await
                    .map_err(StartError::Serve)
            }
        };
        sampler.abort();
        result
    }
}

/// Resolves on SIGINT or SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
