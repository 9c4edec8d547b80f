// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Embedded identity provider: accounts, credential checks, the
//! authorization-code flow, token issuance and validation, and refresh-token
//! rotation.

pub mod model;
pub mod password;
pub mod policy;
pub mod token;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use base64::engine::general_purpose::URL_SAFE_NO_PAD as B64URL;
use base64::Engine;
use chrono::{DateTime, Duration, Utc};
use rand::RngCore;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{AuthConfig, ClientConfig};
use crate::jobstore::{JobStore, StoreError};
use model::{Group, Principal, PrincipalView, RefreshRecord, Role};
use password::{Credential, MIN_PASSWORD_CHARS};
use policy::{Action, Policy};
use token::{Claims, Signer, TokenError, TokenUse};

const LOGIN_TTL_S: i64 = 600;
const MAX_USERNAME: usize = 64;

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// A clock that only moves when told to.
pub struct ManualClock(Mutex<DateTime<Utc>>);

impl ManualClock {
    pub fn new(start: DateTime<Utc>) -> ManualClock {
        ManualClock(Mutex::new(start))
    }

    pub fn advance(&self, by: std::time::Duration) {
        let mut t = self.0.lock().unwrap();
        *t += Duration::from_std(by).expect("duration in range");
    }
}

impl Clock for ManualClock {
    fn now(&self) -> DateTime<Utc> {
        *self.0.lock().unwrap()
    }
}

#[derive(Debug, Error)]
pub enum IdentityError {
    #[error("user `{0}` already exists")]
    DuplicateUser(String),
    #[error("{0}")]
    InvalidRole(String),
    #[error("password must be at least {MIN_PASSWORD_CHARS} characters")]
    WeakPassword,
    #[error("username must be 1-64 characters of [A-Za-z0-9._-]")]
    InvalidUsername,
    #[error("invalid username or password")]
    InvalidCredentials,
    #[error("unknown client")]
    UnknownClient,
    #[error("redirect_uri does not match the registered value")]
    RedirectMismatch,
    #[error("login request is unknown or expired")]
    InvalidLoginHandle,
    #[error("authorization code is invalid, expired, or already used")]
    InvalidCode,
    #[error("refresh token is invalid, expired, or revoked")]
    InvalidRefreshToken,
    #[error("grant type is not enabled")]
    UnsupportedGrant,
    #[error(transparent)]
    Storage(StoreError),
}

impl IdentityError {
    pub fn code(&self) -> &'static str {
        match self {
            IdentityError::DuplicateUser(_) => "DuplicateUser",
            IdentityError::InvalidRole(_) => "InvalidRole",
            IdentityError::WeakPassword => "WeakPassword",
            IdentityError::InvalidUsername => "InvalidUsername",
            IdentityError::InvalidCredentials => "InvalidCredentials",
            IdentityError::UnknownClient => "UnknownClient",
            IdentityError::RedirectMismatch => "RedirectMismatch",
            IdentityError::InvalidLoginHandle => "InvalidLoginHandle",
            IdentityError::InvalidCode => "InvalidCode",
            IdentityError::InvalidRefreshToken => "InvalidRefreshToken",
            IdentityError::UnsupportedGrant => "UnsupportedGrant",
            IdentityError::Storage(e) => e.code(),
        }
    }
}

impl From<StoreError> for IdentityError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::DuplicateUser(u) => IdentityError::DuplicateUser(u),
            other => IdentityError::Storage(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenSet {
    pub access_token: String,
    pub id_token: String,
    pub refresh_token: String,
    pub expires_in: u64,
    pub token_type: &'static str,
}

/// Where to send the browser after a successful login.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoginRedirect {
    pub redirect_uri: String,
    pub code: String,
    pub state: Option<String>,
}

impl LoginRedirect {
    /// `redirect_uri` with `code` and `state` appended as query parameters.
    pub fn location(&self) -> String {
        let mut q = url::form_urlencoded::Serializer::new(String::new());
        q.append_pair("code", &self.code);
        if let Some(s) = &self.state {
            q.append_pair("state", s);
        }
        let sep = if self.redirect_uri.contains('?') { '&' } else { '?' };
        format!("{}{sep}{}", self.redirect_uri, q.finish())
    }
}

struct PendingLogin {
    client_id: String,
    redirect_uri: String,
    state: Option<String>,
    created: DateTime<Utc>,
}

struct IssuedCode {
    subject: String,
    client_id: String,
    redirect_uri: String,
    issued_at: DateTime<Utc>,
}

fn random_token(bytes: usize) -> String {
    let mut buf = vec![0u8; bytes];
    rand::rng().fill_bytes(&mut buf);
    B64URL.encode(buf)
}

fn sha256_hex(s: &str) -> String {
    Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn valid_username(name: &str) -> bool {
    !name.is_empty()
        && name.len() <= MAX_USERNAME
        && name.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-'))
}

/// Parses role names; rejects unknown and empty sets.
pub fn parse_roles<S: AsRef<str>>(names: &[S]) -> Result<Vec<Role>, IdentityError> {
    let mut roles = names
        .iter()
        .map(|n| n.as_ref().parse::<Role>().map_err(IdentityError::InvalidRole))
        .collect::<Result<Vec<_>, _>>()?;
    roles.sort_unstable();
    roles.dedup();
    if roles.is_empty() {
        return Err(IdentityError::InvalidRole("at least one role is required".into()));
    }
    Ok(roles)
}

pub fn parse_group(name: &str) -> Result<Group, IdentityError> {
    name.parse().map_err(IdentityError::InvalidRole)
}

pub struct Identity {
    store: Arc<JobStore>,
    signer: Signer,
    issuer: String,
    access_ttl: i64,
    refresh_ttl: i64,
    code_ttl: i64,
    iterations: u32,
    password_grant: bool,
    clients: Vec<ClientConfig>,
    policy: Policy,
    clock: Arc<dyn Clock>,
    /// Compared against when the username is unknown, so both failure
    /// paths cost one hash.
    decoy: Credential,
    pending: Mutex<HashMap<String, PendingLogin>>,
    codes: Mutex<HashMap<String, IssuedCode>>,
    refresh_lock: Mutex<()>,
}

impl Identity {
    pub fn new(store: Arc<JobStore>, config: &AuthConfig, policy: Policy, clock: Arc<dyn Clock>) -> Identity {
        Identity {
            store,
            signer: Signer::new(config.token_secret.as_bytes()),
            issuer: config.issuer.clone(),
            access_ttl: config.access_ttl_s as i64,
            refresh_ttl: config.refresh_ttl_s as i64,
            code_ttl: config.code_ttl_s as i64,
            iterations: config.pbkdf2_iterations,
            password_grant: config.password_grant,
            clients: config.clients.clone(),
            policy,
            clock,
            decoy: Credential::new(&random_token(16), config.pbkdf2_iterations),
            pending: Mutex::new(HashMap::new()),
            codes: Mutex::new(HashMap::new()),
            refresh_lock: Mutex::new(()),
        }
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn issuer(&self) -> &str {
        &self.issuer
    }

    pub fn password_grant_enabled(&self) -> bool {
        self.password_grant
    }

    pub fn create_user(
        &self,
        username: &str,
        password: &str,
        group: Group,
        roles: &[Role],
    ) -> Result<PrincipalView, IdentityError> {
        if !valid_username(username) {
            return Err(IdentityError::InvalidUsername);
        }
        if password.chars().count() < MIN_PASSWORD_CHARS {
            return Err(IdentityError::WeakPassword);
        }
        let mut roles = roles.to_vec();
        roles.sort_unstable();
        roles.dedup();
        if roles.is_empty() {
            return Err(IdentityError::InvalidRole("at least one role is required".into()));
        }
        if self.store.has_user(username) {
            return Err(IdentityError::DuplicateUser(username.into()));
        }
        let principal = Principal {
            username: username.into(),
            group,
            roles,
            credential: Credential::new(password, self.iterations),
            created_at: self.clock.now(),
        };
        self.store.put_user(&principal)?;
        Ok(PrincipalView::from(&principal))
    }

    pub fn list_users(&self) -> Vec<PrincipalView> {
        self.store.list_users().iter().map(PrincipalView::from).collect()
    }

    pub fn authenticate(&self, username: &str, password: &str) -> Result<Principal, IdentityError> {
        match self.store.get_user(username) {
            Some(p) if p.credential.verify(password) => Ok(p),
            Some(_) => Err(IdentityError::InvalidCredentials),
            None => {
                let _ = self.decoy.verify(password);
                Err(IdentityError::InvalidCredentials)
            }
        }
    }

    fn client(&self, client_id: &str) -> Result<&ClientConfig, IdentityError> {
        self.clients
            .iter()
            .find(|c| c.client_id == client_id)
            .ok_or(IdentityError::UnknownClient)
    }

    /// Validates the client and returns an opaque handle for the login form.
    pub fn begin_authorization(
        &self,
        client_id: &str,
        redirect_uri: &str,
        state: Option<&str>,
    ) -> Result<String, IdentityError> {
        let client = self.client(client_id)?;
        if client.redirect_uri != redirect_uri {
            return Err(IdentityError::RedirectMismatch);
        }
        let now = self.clock.now();
        let handle = random_token(24);
        let mut pending = self.pending.lock().unwrap();
        pending.retain(|_, p| (now - p.created).num_seconds() < LOGIN_TTL_S);
        pending.insert(
            handle.clone(),
            PendingLogin {
                client_id: client_id.into(),
                redirect_uri: redirect_uri.into(),
                state: state.map(str::to_owned),
                created: now,
            },
        );
        Ok(handle)
    }

    /// Checks credentials for a pending login and issues a single-use code.
    /// A failed attempt leaves the handle usable.
    pub fn complete_login(&self, handle: &str, username: &str, password: &str) -> Result<LoginRedirect, IdentityError> {
        let now = self.clock.now();
        {
            let pending = self.pending.lock().unwrap();
            match pending.get(handle) {
                Some(p) if (now - p.created).num_seconds() < LOGIN_TTL_S => {}
                _ => return Err(IdentityError::InvalidLoginHandle),
            }
        }
        let principal = self.authenticate(username, password)?;
        let login = self
            .pending
            .lock()
            .unwrap()
            .remove(handle)
            .ok_or(IdentityError::InvalidLoginHandle)?;
        let code = random_token(32);
        let mut codes = self.codes.lock().unwrap();
        codes.retain(|_, c| (now - c.issued_at).num_seconds() <= self.code_ttl);
        codes.insert(
            code.clone(),
            IssuedCode {
                subject: principal.username,
                client_id: login.client_id,
                redirect_uri: login.redirect_uri.clone(),
                issued_at: now,
            },
        );
        Ok(LoginRedirect {
            redirect_uri: login.redirect_uri,
            code,
            state: login.state,
        })
    }

    /// Redeems a code once. Any attempt consumes it.
    pub fn exchange_code(&self, code: &str, client_id: &str, redirect_uri: &str) -> Result<TokenSet, IdentityError> {
        let now = self.clock.now();
        let issued = self
            .codes
            .lock()
            .unwrap()
            .remove(code)
            .ok_or(IdentityError::InvalidCode)?;
        let fresh = (now - issued.issued_at).num_seconds() <= self.code_ttl && now >= issued.issued_at;
        if !fresh || issued.client_id != client_id || issued.redirect_uri != redirect_uri {
            return Err(IdentityError::InvalidCode);
        }
        let principal = self.store.get_user(&issued.subject).ok_or(IdentityError::InvalidCode)?;
        self.issue(&principal, client_id)
    }

    pub fn password_login(&self, username: &str, password: &str, client_id: &str) -> Result<TokenSet, IdentityError> {
        if !self.password_grant {
            return Err(IdentityError::UnsupportedGrant);
        }
        self.client(client_id)?;
        let principal = self.authenticate(username, password)?;
        self.issue(&principal, client_id)
    }

    /// Rotates a refresh token: the presented one is revoked and a new set
    /// is issued.
    pub fn refresh(&self, refresh_token: &str) -> Result<TokenSet, IdentityError> {
        let _guard = self.refresh_lock.lock().unwrap();
        let hash = sha256_hex(refresh_token);
        let record = self.store.get_refresh(&hash).ok_or(IdentityError::InvalidRefreshToken)?;
        if record.revoked || self.clock.now() >= record.expires_at {
            return Err(IdentityError::InvalidRefreshToken);
        }
        let principal = self
            .store
            .get_user(&record.username)
            .ok_or(IdentityError::InvalidRefreshToken)?;
        self.store.revoke_refresh(&hash)?;
        self.issue(&principal, &record.client_id)
    }

    pub fn validate_access_token(&self, token: &str) -> Result<Claims, TokenError> {
        let claims = self.signer.verify(token, &self.issuer, self.clock.now().timestamp())?;
        if claims.token_use != TokenUse::Access {
            return Err(TokenError::Malformed);
        }
        Ok(claims)
    }

    /// Validates an ID token (profile claims) rather than an access token.
    pub fn validate_id_token(&self, token: &str) -> Result<Claims, TokenError> {
        let claims = self.signer.verify(token, &self.issuer, self.clock.now().timestamp())?;
        if claims.token_use != TokenUse::Id {
            return Err(TokenError::Malformed);
        }
        Ok(claims)
    }

    pub fn check_permission(&self, claims: &Claims, action: Action) -> bool {
        self.policy.check(claims, action)
    }

    fn claims_for(&self, p: &Principal, client_id: &str, token_use: TokenUse, now: i64) -> Claims {
        Claims {
            sub: p.username.clone(),
            preferred_username: p.username.clone(),
            groups: vec![p.group],
            roles: p.roles.clone(),
            iat: now,
            exp: now + self.access_ttl,
            iss: self.issuer.clone(),
            token_use,
            aud: Some(client_id.to_owned()),
        }
    }

    fn issue(&self, p: &Principal, client_id: &str) -> Result<TokenSet, IdentityError> {
        let now = self.clock.now();
        let ts = now.timestamp();
        let refresh_token = random_token(32);
        self.store.put_refresh(&RefreshRecord {
            token_hash: sha256_hex(&refresh_token),
            username: p.username.clone(),
            client_id: client_id.into(),
            issued_at: now,
            expires_at: now + Duration::seconds(self.refresh_ttl),
            revoked: false,
        })?;
        Ok(TokenSet {
            access_token: self.signer.sign(&self.claims_for(p, client_id, TokenUse::Access, ts)),
            id_token: self.signer.sign(&self.claims_for(p, client_id, TokenUse::Id, ts)),
            refresh_token,
            expires_in: self.access_ttl as u64,
            token_type: "Bearer",
        })
    }

    /// Signs claims directly. Used to mint tokens for tests and tooling.
    pub fn sign_claims(&self, claims: &Claims) -> String {
        self.signer.sign(claims)
    }

    pub fn now(&self) -> DateTime<Utc> {
        self.clock.now()
    }
}
