// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Salted PBKDF2-HMAC-SHA256 credentials.

use base64::engine::general_purpose::STANDARD_NO_PAD as B64;
use base64::Engine;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::Sha256;
use subtle::ConstantTimeEq;

pub const SCHEME: &str = "pbkdf2-sha256";
pub const MIN_ITERATIONS: u32 = 100_000;
pub const MIN_PASSWORD_CHARS: usize = 8;
const SALT_BYTES: usize = 16;
const HASH_BYTES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Credential {
    pub scheme: String,
    pub iterations: u32,
    pub salt: String,
    pub hash: String,
}

fn derive(password: &str, salt: &[u8], iterations: u32) -> [u8; HASH_BYTES] {
    let mut out = [0u8; HASH_BYTES];
    pbkdf2::pbkdf2_hmac::<Sha256>(password.as_bytes(), salt, iterations, &mut out);
    out
}

impl Credential {
    pub fn new(password: &str, iterations: u32) -> Credential {
        let mut salt = [0u8; SALT_BYTES];
        rand::rng().fill_bytes(&mut salt);
        Credential::with_salt(password, &salt, iterations)
    }

    pub fn with_salt(password: &str, salt: &[u8], iterations: u32) -> Credential {
        Credential {
            scheme: SCHEME.into(),
            iterations,
            salt: B64.encode(salt),
            hash: B64.encode(derive(password, salt, iterations)),
        }
    }

    /// Constant-time check. Records with an unknown scheme never verify.
    pub fn verify(&self, password: &str) -> bool {
        if self.scheme != SCHEME {
            return false;
        }
        let (Ok(salt), Ok(expected)) = (B64.decode(&self.salt), B64.decode(&self.hash)) else {
            return false;
        };
        let got = derive(password, &salt, self.iterations);
        got.ct_eq(expected.as_slice()).into()
    }
}
