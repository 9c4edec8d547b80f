mod common;

use common::start;
use serde_json::json;

/// Every default-policy decision observed through the HTTP API.
#[tokio::test(flavor = "multi_thread")]
async fn default_policy_over_http() {
    let s = start(|_| {}).await;
    // (user, submit, own, all, monitor, manage)
    let expected = [
        ("alice", true, true, true, true, true),
        ("bob", true, true, false, false, false),
        ("carol", true, true, false, true, false),
        ("dave", true, true, true, true, true),
    ];
    for (user, submit, own, all, monitor, manage) in expected {
        let t = s.token(user).await;
        let code = |ok: bool| if ok { 200 } else { 403 };
        let submit_status = s
            .post_json(&t, "/api/qc/qasm/code", &json!({"code": common::BELL, "shots": 1}))
            .await
            .status();
        assert_eq!(submit_status, code(submit), "{user} submit");
        assert_eq!(s.get(&t, "/api/qc/jobs").await.status(), code(own), "{user} own");
        assert_eq!(s.get(&t, "/api/qc/jobs?scope=all").await.status(), code(all), "{user} all");
        assert_eq!(s.get(&t, "/api/monitor/stats").await.status(), code(monitor), "{user} monitor");
        assert_eq!(s.get(&t, "/api/admin/users").await.status(), code(manage), "{user} manage");
    }
}
