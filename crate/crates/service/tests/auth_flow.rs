mod common;

use common::{start, BELL, PASSWORD};
use qgate_service::gateway::error::ApiError;
use serde_json::{json, Value};

async fn code_flow(s: &common::TestServer, user: &str) -> Value {
    let resp = s
        .http
        .get(s.url("/auth/authorize?response_type=code&client_id=webui&redirect_uri=%2Fcallback&state=xyz"))
        .header("accept", "application/json")
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 200);
    let handle = resp.json::<Value>().await.unwrap()["login_handle"].as_str().unwrap().to_owned();
    let resp = s
        .http
        .post(s.url("/auth/login"))
        .form(&[("handle", handle.as_str()), ("username", user), ("password", PASSWORD)])
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 302);
    let location = resp.headers()["location"].to_str().unwrap().to_owned();
    assert!(location.starts_with("/callback?"), "{location}");
    let q: std::collections::HashMap<String, String> =
        url::form_urlencoded::parse(location.split_once('?').unwrap().1.as_bytes()).into_owned().collect();
    assert_eq!(q["state"], "xyz");
    let code = q["code"].clone();
    let resp = s
        .http
        .post(s.url("/auth/token"))
        .form(&[
            ("grant_type", "authorization_code"),
            ("code", code.as_str()),
            ("client_id", "webui"),
            ("redirect_uri", "/callback"),
        ])
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 200);
    assert_eq!(resp.headers()["cache-control"], "no-store");
    let mut tokens: Value = resp.json().await.unwrap();
    tokens["code"] = json!(code);
    tokens
}

#[tokio::test(flavor = "multi_thread")]
async fn authorization_code_flow_end_to_end() {
    let s = start(|c| c.auth.password_grant = false).await;
    let tokens = code_flow(&s, "carol").await;
    assert_eq!(tokens["token_type"], "Bearer");
    assert_eq!(tokens["expires_in"], 300);
    let access = tokens["access_token"].as_str().unwrap();

    let me: Value = s.get(access, "/api/user/me").await.json().await.unwrap();
    assert_eq!(me, json!({"username": "carol", "group": "internal", "roles": ["user"]}));

    let resp = s.post_json(access, "/api/qc/qasm/code", &json!({"code": BELL, "shots": 100, "seed": 1})).await;
    assert_eq!(resp.status(), 200);

    let resp = s
        .http
        .post(s.url("/auth/token"))
        .form(&[
            ("grant_type", "authorization_code"),
            ("code", tokens["code"].as_str().unwrap()),
            ("client_id", "webui"),
            ("redirect_uri", "/callback"),
        ])
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 400);
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "InvalidCode");

    let id = s.state.identity().validate_id_token(tokens["id_token"].as_str().unwrap()).unwrap();
    assert_eq!(id.preferred_username, "carol");
    assert!(s.state.identity().validate_access_token(tokens["id_token"].as_str().unwrap()).is_err());
}

#[tokio::test(flavor = "multi_thread")]
async fn html_login_page_and_bad_requests() {
    let s = start(|_| {}).await;
    let resp = s
        .http
        .get(s.url("/auth/authorize?response_type=code&client_id=webui&redirect_uri=/callback"))
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 200);
    assert!(resp.headers()["content-type"].to_str().unwrap().starts_with("text/html"));
    assert!(resp.text().await.unwrap().contains("name=\"handle\""));

    let resp = s
        .http
        .get(s.url("/auth/authorize?response_type=code&client_id=webui&redirect_uri=/evil"))
        .send()
        .await
        .unwrap();
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "RedirectMismatch");
    let resp = s
        .http
        .get(s.url("/auth/authorize?response_type=token&client_id=webui&redirect_uri=/callback"))
        .send()
        .await
        .unwrap();
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "UnsupportedResponseType");
    let resp = s
        .http
        .get(s.url("/auth/authorize?response_type=code&client_id=nobody&redirect_uri=/callback"))
        .send()
        .await
        .unwrap();
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "UnknownClient");
    let resp = s.http.post(s.url("/auth/token")).form(&[("grant_type", "implicit")]).send().await.unwrap();
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "UnsupportedGrant");
}

#[tokio::test(flavor = "multi_thread")]
async fn wrong_password_keeps_login_handle() {
    let s = start(|_| {}).await;
    let handle = s
        .state
        .identity()
        .begin_authorization("webui", "/callback", None)
        .unwrap();
    let resp = s
        .http
        .post(s.url("/auth/login"))
        .form(&[("handle", handle.as_str()), ("username", "carol"), ("password", "not it at all")])
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 401);
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "InvalidCredentials");
    let resp = s
        .http
        .post(s.url("/auth/login"))
        .form(&[("handle", handle.as_str()), ("username", "carol"), ("password", PASSWORD)])
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 302);
}

#[tokio::test(flavor = "multi_thread")]
async fn refresh_rotates_and_revokes() {
    let s = start(|_| {}).await;
    let tokens = code_flow(&s, "bob").await;
    let old = tokens["refresh_token"].as_str().unwrap();
    let resp = s
        .http
        .post(s.url("/auth/token"))
        .form(&[("grant_type", "refresh_token"), ("refresh_token", old)])
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 200);
    let fresh: Value = resp.json().await.unwrap();
    assert_ne!(fresh["refresh_token"], tokens["refresh_token"]);
    let resp = s.get(fresh["access_token"].as_str().unwrap(), "/api/user/me").await;
    assert_eq!(resp.status(), 200);

    let resp = s
        .http
        .post(s.url("/auth/token"))
        .form(&[("grant_type", "refresh_token"), ("refresh_token", old)])
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 400);
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "InvalidRefreshToken");
}

#[tokio::test(flavor = "multi_thread")]
async fn password_grant_is_opt_in() {
    let s = start(|c| c.auth.password_grant = false).await;
    let resp = s
        .http
        .post(s.url("/auth/token"))
        .form(&[("grant_type", "password"), ("username", "bob"), ("password", PASSWORD), ("client_id", "qgate-cli")])
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 400);
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "UnsupportedGrant");
}

#[tokio::test(flavor = "multi_thread")]
async fn rejected_tokens() {
    let s = start(|_| {}).await;
    let token = s.token("bob").await;

    let resp = s.http.get(s.url("/api/user/me")).send().await.unwrap();
    assert_eq!(resp.status(), 401);
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "MissingToken");

    let mut tampered = token.clone().into_bytes();
    let i = tampered.iter().position(|&b| b == b'.').unwrap() + 3;
    tampered[i] = if tampered[i] == b'A' { b'B' } else { b'A' };
    let resp = s.get(std::str::from_utf8(&tampered).unwrap(), "/api/user/me").await;
    assert_eq!(resp.status(), 401);

    let resp = s.get("not-a-jwt", "/api/user/me").await;
    assert_eq!(resp.status(), 401);
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "Malformed");

    let resp = s.http.get(s.url("/api/user/me")).header("authorization", "Basic abc").send().await.unwrap();
    assert_eq!(resp.status(), 401);
}
