mod common;

use common::start;
use qgate_service::gateway::error::ApiError;
use qgate_service::monitor::ResourceSample;
use serde_json::{json, Value};

#[tokio::test(flavor = "multi_thread")]
async fn admin_user_management() {
    let s = start(|_| {}).await;
    let admin = s.token("dave").await;
    let user = s.token("bob").await;
    let new = json!({"username": "erin", "password": "long enough pw", "group": "internal", "roles": ["user", "admin"]});

    let resp = s.post_json(&user, "/api/admin/users", &new).await;
    assert_eq!(resp.status(), 403);
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "Forbidden");
    assert_eq!(s.get(&user, "/api/admin/users").await.status(), 403);

    let resp = s.post_json(&admin, "/api/admin/users", &new).await;
    assert_eq!(resp.status(), 201);
    let view: Value = resp.json().await.unwrap();
    assert_eq!(view, json!({"username": "erin", "group": "internal", "roles": ["user", "admin"]}));

    let resp = s.post_json(&admin, "/api/admin/users", &new).await;
    assert_eq!(resp.status(), 409);
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "DuplicateUser");

    let weak = json!({"username": "frank", "password": "short", "group": "external", "roles": ["user"]});
    let resp = s.post_json(&admin, "/api/admin/users", &weak).await;
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "WeakPassword");
    let bad_role = json!({"username": "frank", "password": "long enough pw", "group": "external", "roles": ["root"]});
    let resp = s.post_json(&admin, "/api/admin/users", &bad_role).await;
    assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "InvalidRole");

    let users: Vec<Value> = s.get(&admin, "/api/admin/users").await.json().await.unwrap();
    let names: Vec<&str> = users.iter().map(|u| u["username"].as_str().unwrap()).collect();
    assert!(names.contains(&"erin"));
    assert!(users.iter().all(|u| u.get("credential").is_none()));

    let erin = s
        .http
        .post(s.url("/auth/token"))
        .form(&[("grant_type", "password"), ("username", "erin"), ("password", "long enough pw"), ("client_id", "qgate-cli")])
        .send()
        .await
        .unwrap();
    assert_eq!(erin.status(), 200);
}

#[tokio::test(flavor = "multi_thread")]
async fn monitor_access_and_window() {
    let s = start(|_| {}).await;
    let internal_user = s.token("carol").await;
    let external_user = s.token("bob").await;
    let external_admin = s.token("dave").await;
    tokio::time::sleep(std::time::Duration::from_millis(300)).await;

    let resp = s.get(&external_user, "/api/monitor/stats").await;
    assert_eq!(resp.status(), 403);
    assert_eq!(s.get(&external_admin, "/api/monitor/stats").await.status(), 200);
    let samples: Vec<ResourceSample> = s.get(&internal_user, "/api/monitor/stats").await.json().await.unwrap();
    assert!(samples.len() >= 2);
    assert!(samples.windows(2).all(|w| w[0].timestamp < w[1].timestamp
        && w[0].net_rx_bytes <= w[1].net_rx_bytes
        && w[0].net_tx_bytes <= w[1].net_tx_bytes));
    assert!(samples.iter().all(|x| x.component == "gateway"));

    for bad in ["0", "-1", "nan", "inf", "abc"] {
        let resp = s.get(&internal_user, &format!("/api/monitor/stats?window_s={bad}")).await;
        assert_eq!(resp.status(), 400, "{bad}");
        assert_eq!(resp.json::<ApiError>().await.unwrap().error_code, "InvalidWindow");
    }
    let short: Vec<ResourceSample> =
        s.get(&internal_user, "/api/monitor/stats?window_s=0.12").await.json().await.unwrap();
    assert!(short.len() < samples.len() + 4);
}

#[tokio::test(flavor = "multi_thread")]
async fn traffic_is_counted() {
    let s = start(|_| {}).await;
    let t = s.token("carol").await;
    let meter = s.state.monitor().meter().clone();
    let (rx0, tx0) = (meter.rx(), meter.tx());
    let body = s.get(&t, "/api/user/me").await.bytes().await.unwrap();
    assert!(meter.tx() - tx0 >= body.len() as u64 + "HTTP/1.1 200 OK\r\n".len() as u64);
    assert!(meter.rx() - rx0 >= "GET /api/user/me HTTP/1.1\r\n".len() as u64);
}
