#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

use serde_json::Value;

pub const SECRET: &str = "acceptance-secret-acceptance-secret";
pub const PASSWORD: &str = "correct horse battery";

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_qgate")
}

pub fn qgate(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env_remove("QGATE_TOKEN")
        .env_remove("QGATE_PASSWORD")
        .env_remove("QGATE_TOKEN_SECRET")
        .output()
        .expect("spawn qgate")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Writes a config listening on an ephemeral port, with the password grant
/// enabled. `extra` is appended verbatim.
pub fn write_config(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("qgate.toml");
    let text = format!(
        "[server]\nlisten = \"127.0.0.1:0\"\n\n[auth]\ntoken_secret = \"{SECRET}\"\npassword_grant = true\n\n[storage]\njournal_path = \"jobs.journal\"\n{extra}"
    );
    std::fs::write(&path, text).unwrap();
    path
}

pub fn add_user(config: &Path, name: &str, group: &str, roles: &str) {
    let o = qgate(&[
        "user", "add", name, "--group", group, "--roles", roles, "--password", PASSWORD, "--config",
        config.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "user add {name}: {}", stderr(&o));
}

pub struct Server {
    child: Child,
    pub base: String,
    pub log: PathBuf,
}

impl Server {
    pub fn spawn(config: &Path) -> Server {
        let log = config.with_extension(format!("{}.log", std::process::id()));
        let log_file = std::fs::OpenOptions::new().create(true).append(true).open(&log).unwrap();
        let mut child = Command::new(bin())
            .args(["serve", "--config", config.to_str().unwrap()])
            .env_remove("QGATE_TOKEN_SECRET")
            .env("RUST_LOG", "warn")
            .stdout(Stdio::piped())
            .stderr(Stdio::from(log_file))
            .spawn()
            .expect("spawn qgate serve");
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
        let base = line
            .trim()
            .strip_prefix("qgate listening on ")
            .unwrap_or_else(|| panic!("unexpected startup line {line:?}; log: {}", std::fs::read_to_string(&log).unwrap_or_default()))
            .to_owned();
        Server { child, base, log }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    /// SIGKILL, no shutdown hooks.
    pub fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }

    pub fn token(&self, user: &str) -> String {
        let resp = client()
            .post(self.url("/auth/token"))
            .form(&[
                ("grant_type", "password"),
                ("username", user),
                ("password", PASSWORD),
                ("client_id", "qgate-cli"),
            ])
            .send()
            .unwrap();
        assert_eq!(resp.status(), 200, "login {user}");
        resp.json::<Value>().unwrap()["access_token"].as_str().unwrap().to_owned()
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        self.kill();
    }
}

pub fn client() -> reqwest::blocking::Client {
    reqwest::blocking::Client::builder()
        .redirect(reqwest::redirect::Policy::none())
        .build()
        .unwrap()
}

pub const BELL: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\nh q[0];\ncx q[0],q[1];\nmeasure q -> c;\n";
