// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! `qgate user add|list`, against the journal directly or a running gateway.

use std::path::Path;
use std::sync::Arc;

use qgate_service::config::Config;
use qgate_service::identity::policy::Policy;
use qgate_service::identity::{parse_group, parse_roles, Identity, SystemClock};
use qgate_service::jobstore::JobStore;
use serde_json::json;

use crate::error::CliError;
use crate::remote::Remote;

pub enum Target<'a> {
    /// The journal named in a config file; the service must be stopped.
    Local(&'a Path),
    Remote(Remote),
}

fn open_local(config: &Path) -> Result<Identity, CliError> {
    let config = Config::load(config)?;
    let store = Arc::new(JobStore::open(&config.storage.journal_path)?);
    let policy = config.policy.clone().map(Policy::new).unwrap_or_default();
    Ok(Identity::new(store, &config.auth, policy, Arc::new(SystemClock)))
}

pub fn add(target: Target, username: &str, password: &str, group: &str, roles: &[String]) -> Result<String, CliError> {
    match target {
        Target::Local(config) => {
            let group = parse_group(group)?;
            let roles = parse_roles(roles)?;
            let identity = open_local(config)?;
            let view = identity.create_user(username, password, group, &roles)?;
            Ok(serde_json::to_string(&view).expect("view serializes"))
        }
        Target::Remote(remote) => {
            let body = json!({ "username": username, "password": password, "group": group, "roles": roles });
            let bytes = remote.post_json("/api/admin/users", &body)?;
            Ok(String::from_utf8_lossy(&bytes).into_owned())
        }
    }
}

pub fn list(target: Target) -> Result<String, CliError> {
    match target {
        Target::Local(config) => {
            let identity = open_local(config)?;
            Ok(serde_json::to_string(&identity.list_users()).expect("views serialize"))
        }
        Target::Remote(remote) => {
            let bytes = remote.get("/api/admin/users")?;
            Ok(String::from_utf8_lossy(&bytes).into_owned())
        }
    }
}
