// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! The gateway service: identity, job storage, monitoring, and the HTTP API
//! around the `qgate-core` simulator.

pub mod config;
pub mod gateway;
pub mod identity;
pub mod jobstore;
pub mod monitor;

pub use config::Config;
pub use gateway::{AppState, Gateway, StartError};
