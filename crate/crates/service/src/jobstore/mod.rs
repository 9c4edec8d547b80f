// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Durable store for principals, jobs, and refresh-token records.
//!
//! All state lives in one append-only journal; the in-memory index is
//! rebuilt from it on open. A write is acknowledged only after its frame is
//! flushed. Writers are serialized; readers only take the index lock, which
//! is held for an insert, never for I/O.

pub mod csv;
pub mod journal;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use qgate_core::circuit::Bindings;
use qgate_core::pipeline::SourceFormat;
use qgate_core::sim::{NoiseSpec, ResultObject};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identity::model::{Principal, RefreshRecord};
use journal::Journal;

pub use csv::{counts_to_csv, export_csv, parse_csv, CsvError};

const TAG_USER: u8 = b'U';
const TAG_JOB: u8 = b'J';
const TAG_REFRESH: u8 = b'R';
const TAG_REVOKE: u8 = b'X';

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("job id `{0}` already exists")]
    DuplicateJobId(String),
    #[error("user `{0}` already exists")]
    DuplicateUser(String),
    #[error("unknown user `{0}`")]
    UnknownOwner(String),
    #[error("not found")]
    NotFound,
    #[error("storage failure: {0}")]
    StorageFailure(#[from] std::io::Error),
    #[error("journal {path} is corrupt at record {index}: {message}")]
    Corrupt {
        path: PathBuf,
        index: usize,
        message: String,
    },
}

impl StoreError {
    pub fn code(&self) -> &'static str {
        match self {
            StoreError::DuplicateJobId(_) => "DuplicateJobId",
            StoreError::DuplicateUser(_) => "DuplicateUser",
            StoreError::UnknownOwner(_) => "UnknownOwner",
            StoreError::NotFound => "NotFound",
            StoreError::StorageFailure(_) | StoreError::Corrupt { .. } => "StorageFailure",
        }
    }
}

/// What was submitted, kept alongside the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRequest {
    pub source: String,
    pub parameters: Option<Bindings>,
    pub shots: u64,
    pub seed: Option<u64>,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub backend: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub job_id: String,
    pub owner: String,
    pub submitted_at: DateTime<Utc>,
    pub input_format: SourceFormat,
    pub request: JobRequest,
    pub result: ResultObject,
}

/// A job as read back: the parsed record and its exact stored bytes.
#[derive(Debug, Clone)]
pub struct StoredJob {
    pub record: Arc<JobRecord>,
    pub raw: Arc<[u8]>,
}

#[derive(Default)]
struct Index {
    users: HashMap<String, Principal>,
    user_order: Vec<String>,
    jobs: HashMap<String, StoredJob>,
    job_order: Vec<String>,
    refresh: HashMap<String, RefreshRecord>,
}

impl Index {
    fn apply(&mut self, tag: u8, body: &[u8]) -> Result<(), String> {
        match tag {
            TAG_USER => {
                let p: Principal = serde_json::from_slice(body).map_err(|e| e.to_string())?;
                if !self.users.contains_key(&p.username) {
                    self.user_order.push(p.username.clone());
                }
                self.users.insert(p.username.clone(), p);
            }
            TAG_JOB => {
                let record: JobRecord = serde_json::from_slice(body).map_err(|e| e.to_string())?;
                let id = record.job_id.clone();
                if self.jobs.contains_key(&id) {
                    return Err(format!("duplicate job id {id}"));
                }
                self.job_order.push(id.clone());
                self.jobs.insert(
                    id,
                    StoredJob {
                        record: Arc::new(record),
                        raw: body.into(),
                    },
                );
            }
            TAG_REFRESH => {
                let r: RefreshRecord = serde_json::from_slice(body).map_err(|e| e.to_string())?;
                self.refresh.insert(r.token_hash.clone(), r);
            }
            TAG_REVOKE => {
                let hash: String = serde_json::from_slice(body).map_err(|e| e.to_string())?;
                if let Some(r) = self.refresh.get_mut(&hash) {
                    r.revoked = true;
                }
            }
            other => return Err(format!("unknown record tag {other:#x}")),
        }
        Ok(())
    }
}

pub struct JobStore {
    path: PathBuf,
    writer: Mutex<Journal>,
    index: RwLock<Index>,
    recovered_bytes: u64,
}

fn frame(tag: u8, body: &[u8]) -> Vec<u8> {
    let mut v = Vec::with_capacity(1 + body.len());
    v.push(tag);
    v.extend_from_slice(body);
    v
}

impl JobStore {
    pub fn open(path: &Path) -> Result<JobStore, StoreError> {
        let recovered = Journal::open(path)?;
        let mut index = Index::default();
        for (i, rec) in recovered.records.iter().enumerate() {
            let corrupt = |message: String| StoreError::Corrupt {
                path: path.to_owned(),
                index: i,
                message,
            };
            let (&tag, body) = rec.split_first().ok_or_else(|| corrupt("empty record".into()))?;
            index.apply(tag, body).map_err(corrupt)?;
        }
        if recovered.truncated > 0 {
            tracing::warn!(path = %path.display(), bytes = recovered.truncated, "dropped torn journal tail");
        }
        Ok(JobStore {
            path: path.to_owned(),
            writer: Mutex::new(recovered.journal),
            index: RwLock::new(index),
            recovered_bytes: recovered.truncated,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Bytes discarded from a damaged tail when the store was opened.
    pub fn recovered_bytes(&self) -> u64 {
        self.recovered_bytes
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, Index> {
        self.index.read().unwrap_or_else(|e| e.into_inner())
    }

    /// Appends under the writer lock after `check` passes, then indexes.
    fn commit(
        &self,
        tag: u8,
        body: Vec<u8>,
        check: impl FnOnce(&Index) -> Result<(), StoreError>,
    ) -> Result<(), StoreError> {
        let mut writer = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        check(&self.read())?;
        writer.append(&frame(tag, &body))?;
        let mut index = self.index.write().unwrap_or_else(|e| e.into_inner());
        index
            .apply(tag, &body)
            .expect("records are validated before they are written");
        Ok(())
    }

    pub fn put_user(&self, principal: &Principal) -> Result<(), StoreError> {
        let body = serde_json::to_vec(principal).expect("principal serializes");
        let name = principal.username.clone();
        self.commit(TAG_USER, body, |ix| {
            if ix.users.contains_key(&name) {
                Err(StoreError::DuplicateUser(name))
            } else {
                Ok(())
            }
        })
    }

    pub fn get_user(&self, username: &str) -> Option<Principal> {
        self.read().users.get(username).cloned()
    }

    pub fn has_user(&self, username: &str) -> bool {
        self.read().users.contains_key(username)
    }

    /// In creation order.
    pub fn list_users(&self) -> Vec<Principal> {
        let ix = self.read();
        ix.user_order.iter().map(|u| ix.users[u].clone()).collect()
    }

    pub fn put_job(&self, record: &JobRecord) -> Result<String, StoreError> {
        let body = serde_json::to_vec(record).expect("job record serializes");
        let id = record.job_id.clone();
        let owner = record.owner.clone();
        self.commit(TAG_JOB, body, |ix| {
            if ix.jobs.contains_key(&id) {
                Err(StoreError::DuplicateJobId(id.clone()))
            } else if !ix.users.contains_key(&owner) {
                Err(StoreError::UnknownOwner(owner))
            } else {
                Ok(())
            }
        })?;
        Ok(id)
    }

    pub fn get_job(&self, job_id: &str) -> Result<StoredJob, StoreError> {
        self.read().jobs.get(job_id).cloned().ok_or(StoreError::NotFound)
    }

    /// Newest first by write order; `owner` filters to one user's jobs.
    pub fn list_jobs(&self, owner: Option<&str>) -> Vec<StoredJob> {
        let ix = self.read();
        ix.job_order
            .iter()
            .rev()
            .map(|id| &ix.jobs[id])
            .filter(|j| owner.is_none_or(|o| j.record.owner == o))
            .cloned()
            .collect()
    }

    pub fn job_count(&self) -> usize {
        self.read().job_order.len()
    }

    pub fn put_refresh(&self, record: &RefreshRecord) -> Result<(), StoreError> {
        let body = serde_json::to_vec(record).expect("refresh record serializes");
        self.commit(TAG_REFRESH, body, |_| Ok(()))
    }

    pub fn revoke_refresh(&self, token_hash: &str) -> Result<(), StoreError> {
        let body = serde_json::to_vec(token_hash).expect("string serializes");
        self.commit(TAG_REVOKE, body, |_| Ok(()))
    }

    pub fn get_refresh(&self, token_hash: &str) -> Option<RefreshRecord> {
        self.read().refresh.get(token_hash).cloned()
    }
}
