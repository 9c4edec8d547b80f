use qgate_service::config::Config;

fn read(rel: &str) -> String {
    std::fs::read_to_string(format!("{}/../../{rel}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn container_config_is_valid_once_secret_is_supplied() {
    let text = read("deploy/qgate.toml").replace("[auth]\n", "[auth]\ntoken_secret = \"0123456789abcdef0123456789abcdef\"\n");
    let c = Config::from_toml(&text).unwrap();
    assert_eq!(c.server.listen.port(), 8080);
    assert!(c.auth.clients.iter().any(|k| k.client_id == "webui" && k.redirect_uri == "/callback"));
    assert!(!c.auth.password_grant);
}

#[test]
fn example_config_is_valid() {
    let c = Config::from_toml(&read("qgate.example.toml")).unwrap();
    assert!(c.auth.password_grant);
}
