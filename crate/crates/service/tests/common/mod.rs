#![allow(dead_code)]

use qgate_service::config::{Config, CLI_CLIENT_ID};
use qgate_service::identity::model::{Group, Role};
use qgate_service::{AppState, Gateway};
use serde_json::Value;
use tempfile::TempDir;
use tokio::sync::oneshot;

pub const SECRET: &str = "test-secret-test-secret-test-secret!";
pub const PASSWORD: &str = "correct horse battery";

pub struct TestServer {
    pub base: String,
    pub state: AppState,
    pub dir: TempDir,
    pub http: reqwest::Client,
    stop: Option<oneshot::Sender<()>>,
    task: Option<tokio::task::JoinHandle<()>>,
}

/// alice: internal admin, bob: external user, carol: internal user,
/// dave: external admin.
pub const USERS: &[(&str, Group, &[Role])] = &[
    ("alice", Group::Internal, &[Role::Admin]),
    ("bob", Group::External, &[Role::User]),
    ("carol", Group::Internal, &[Role::User]),
    ("dave", Group::External, &[Role::Admin]),
];

pub async fn start(tweak: impl FnOnce(&mut Config)) -> TestServer {
    let dir = tempfile::tempdir().unwrap();
    let mut config = Config::new(SECRET, dir.path().join("jobs.journal"));
    config.server.listen = "127.0.0.1:0".parse().unwrap();
    config.auth.password_grant = true;
    config.monitor.sample_interval_s = 0.05;
    tweak(&mut config);
    let gateway = Gateway::open(config).unwrap();
    let state = gateway.state().clone();
    for (name, group, roles) in USERS {
        if !state.store().has_user(name) {
            state.identity().create_user(name, PASSWORD, *group, roles).unwrap();
        }
    }
    let listener = gateway.bind().unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = oneshot::channel::<()>();
    let task = tokio::spawn(async move {
        gateway
            .serve(listener, async {
                let _ = rx.await;
            })
            .await
            .unwrap();
    });
    TestServer {
        base: format!("http://{addr}"),
        state,
        dir,
        http: reqwest::Client::builder()
            .redirect(reqwest::redirect::Policy::none())
            .build()
            .unwrap(),
        stop: Some(tx),
        task: Some(task),
    }
}

impl TestServer {
    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    /// Access token via the password grant.
    pub async fn token(&self, user: &str) -> String {
        let resp = self
            .http
            .post(self.url("/auth/token"))
            .form(&[
                ("grant_type", "password"),
                ("username", user),
                ("password", PASSWORD),
                ("client_id", CLI_CLIENT_ID),
            ])
            .send()
            .await
            .unwrap();
        assert_eq!(resp.status(), 200, "login {user}");
        let body: Value = resp.json().await.unwrap();
        body["access_token"].as_str().unwrap().to_owned()
    }

    pub async fn get(&self, token: &str, path: &str) -> reqwest::Response {
        self.http.get(self.url(path)).bearer_auth(token).send().await.unwrap()
    }

    pub async fn post_json(&self, token: &str, path: &str, body: &Value) -> reqwest::Response {
        self.http.post(self.url(path)).bearer_auth(token).json(body).send().await.unwrap()
    }

    pub async fn stop(mut self) -> TempDir {
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
        if let Some(task) = self.task.take() {
            task.await.unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        std::mem::replace(&mut self.dir, dir)
    }
}

impl Drop for TestServer {
    fn drop(&mut self) {
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
    }
}

pub const BELL: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\nh q[0];\ncx q[0],q[1];\nmeasure q -> c;\n";
