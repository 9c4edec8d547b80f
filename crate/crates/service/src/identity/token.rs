// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Compact JWS tokens signed with HMAC-SHA256.

use base64::engine::general_purpose::URL_SAFE_NO_PAD as B64URL;
use base64::Engine;
use hmac::{Hmac, Mac};
use serde::{Deserialize, Serialize};
use sha2::Sha256;
use thiserror::Error;

use super::model::{Group, Role};

type HmacSha256 = Hmac<Sha256>;

const HEADER_JSON: &str = r#"{"alg":"HS256","typ":"JWT"}"#;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenUse {
    Access,
    Id,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claims {
    pub sub: String,
    pub preferred_username: String,
    pub groups: Vec<Group>,
    pub roles: Vec<Role>,
    pub iat: i64,
    pub exp: i64,
    pub iss: String,
    pub token_use: TokenUse,
    /// Client the token was issued to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aud: Option<String>,
}

impl Claims {
    pub fn group(&self) -> Option<Group> {
        self.groups.first().copied()
    }

    pub fn has_role(&self, role: Role) -> bool {
        self.roles.contains(&role)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum TokenError {
    #[error("token is malformed")]
    Malformed,
    #[error("token signature is invalid")]
    InvalidSignature,
    #[error("token has expired")]
    Expired,
}

impl TokenError {
    pub fn code(self) -> &'static str {
        match self {
            TokenError::Malformed => "Malformed",
            TokenError::InvalidSignature => "InvalidSignature",
            TokenError::Expired => "Expired",
        }
    }
}

#[derive(Clone)]
pub struct Signer {
    key: Vec<u8>,
}

impl std::fmt::Debug for Signer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Signer(..)")
    }
}

#[derive(Deserialize)]
struct Header {
    alg: String,
}

impl Signer {
    pub fn new(secret: &[u8]) -> Signer {
        Signer { key: secret.to_vec() }
    }

    fn mac(&self) -> HmacSha256 {
        HmacSha256::new_from_slice(&self.key).expect("hmac accepts any key length")
    }

    pub fn sign(&self, claims: &Claims) -> String {
        let payload = serde_json::to_vec(claims).expect("claims serialize");
        let signing_input = format!("{}.{}", B64URL.encode(HEADER_JSON), B64URL.encode(payload));
        let mut mac = self.mac();
        mac.update(signing_input.as_bytes());
        let sig = mac.finalize().into_bytes();
        format!("{signing_input}.{}", B64URL.encode(sig))
    }

    /// Checks structure, signature, algorithm, issuer, and expiry at `now`
    /// (unix seconds), in that order.
    pub fn verify(&self, token: &str, issuer: &str, now: i64) -> Result<Claims, TokenError> {
        let mut parts = token.split('.');
        let (Some(h), Some(p), Some(s), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(TokenError::Malformed);
        };
        let sig = B64URL.decode(s).map_err(|_| TokenError::Malformed)?;
        let mut mac = self.mac();
        mac.update(h.as_bytes());
        mac.update(b".");
        mac.update(p.as_bytes());
        mac.verify_slice(&sig).map_err(|_| TokenError::InvalidSignature)?;
        let header: Header = B64URL
            .decode(h)
            .ok()
            .and_then(|b| serde_json::from_slice(&b).ok())
            .ok_or(TokenError::Malformed)?;
        if header.alg != "HS256" {
            return Err(TokenError::Malformed);
        }
        let claims: Claims = B64URL
            .decode(p)
            .ok()
            .and_then(|b| serde_json::from_slice(&b).ok())
            .ok_or(TokenError::Malformed)?;
        if claims.iss != issuer {
            return Err(TokenError::InvalidSignature);
        }
        if now >= claims.exp {
            return Err(TokenError::Expired);
        }
        Ok(claims)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn claims(exp: i64) -> Claims {
        Claims {
            sub: "alice".into(),
            preferred_username: "alice".into(),
            groups: vec![Group::Internal],
            roles: vec![Role::Admin],
            iat: 1000,
            exp,
            iss: "qgate".into(),
            token_use: TokenUse::Access,
            aud: None,
        }
    }

    #[test]
    fn hmac_sha256_reference() {
        // RFC 4231 test case 2.
        let mut mac = HmacSha256::new_from_slice(b"Jefe").unwrap();
        mac.update(b"what do ya want for nothing?");
        let out = mac.finalize().into_bytes();
        assert_eq!(
            out[..],
            [
                0x5b, 0xdc, 0xc1, 0x46, 0xbf, 0x60, 0x75, 0x4e, 0x6a, 0x04, 0x24, 0x26, 0x08, 0x95, 0x75, 0xc7,
                0x5a, 0x00, 0x3f, 0x08, 0x9d, 0x27, 0x39, 0x83, 0x9d, 0xec, 0x58, 0xb9, 0x64, 0xec, 0x38, 0x43,
            ][..]
        );
    }

    #[test]
    fn round_trip_and_expiry() {
        let s = Signer::new(b"k");
        let t = s.sign(&claims(1300));
        assert_eq!(t.split('.').count(), 3);
        assert_eq!(s.verify(&t, "qgate", 1299).unwrap(), claims(1300));
        assert_eq!(s.verify(&t, "qgate", 1300), Err(TokenError::Expired));
        assert_eq!(s.verify(&t, "other", 1000), Err(TokenError::InvalidSignature));
        assert_eq!(Signer::new(b"j").verify(&t, "qgate", 1000), Err(TokenError::InvalidSignature));
    }

    #[test]
    fn malformed() {
        let s = Signer::new(b"k");
        for t in ["", "a.b", "a.b.c.d", "a.b.!!!"] {
            assert_eq!(s.verify(t, "qgate", 0), Err(TokenError::Malformed), "{t}");
        }
        // Correctly signed garbage payload.
        let input = format!("{}.{}", B64URL.encode(HEADER_JSON), B64URL.encode("not json"));
        let mut mac = s.mac();
        mac.update(input.as_bytes());
        let t = format!("{input}.{}", B64URL.encode(mac.finalize().into_bytes()));
        assert_eq!(s.verify(&t, "qgate", 0), Err(TokenError::Malformed));
    }

    #[test]
    fn header_is_standard() {
        let t = Signer::new(b"k").sign(&claims(2000));
        let h = B64URL.decode(t.split('.').next().unwrap()).unwrap();
        assert_eq!(h, HEADER_JSON.as_bytes());
        let p: serde_json::Value =
            serde_json::from_slice(&B64URL.decode(t.split('.').nth(1).unwrap()).unwrap()).unwrap();
        for k in ["sub", "preferred_username", "groups", "roles", "iat", "exp", "iss"] {
            assert!(p.get(k).is_some(), "{k}");
        }
    }

    proptest! {
        #[test]
        fn any_bit_flip_in_header_or_payload_is_rejected(bit in 0usize..4096) {
            let s = Signer::new(b"secret");
            let t = s.sign(&claims(i64::MAX));
            let dot2 = t.rfind('.').unwrap();
            let mut signed = t.as_bytes()[..dot2].to_vec();
            let i = (bit / 8) % signed.len();
            signed[i] ^= 1 << (bit % 8);
            let forged = format!("{}{}", String::from_utf8_lossy(&signed), &t[dot2..]);
            prop_assert!(s.verify(&forged, "qgate", 0).is_err());
        }
    }
}
