use std::process::{Command, Output};

fn k3gw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3gw")).args(args).env_remove("K3GW_CACHE").output().expect("run k3gw")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim().to_string()
}

#[test]
fn kernel_outputs() {
    let o = k3gw(&["kernel", "--which", "A", "--k", "2", "--format", "qmod"]);
    assert_eq!(stdout(&o), "2*G2^2 + 1/6*G4");
    assert_eq!(stdout(&k3gw(&["kernel", "--which", "C", "--k", "0", "--l", "0"])), "0");
    let o = k3gw(&["kernel", "--which", "B", "--k", "0", "--format", "qexp", "--qprec", "3"]);
    assert_eq!(stdout(&o), "q + 6*q^2 + 12*q^3 + O(q^4)");
}

#[test]
fn invariants() {
    assert_eq!(stdout(&k3gw(&["invariant", "--bracket", "", "--beta-sq-half", "-1"])), "1");
    assert_eq!(stdout(&k3gw(&["invariant", "--bracket", "tau(0,pt)", "--beta-sq-half", "-1"])), "0");
    let o = k3gw(&["invariant", "--bracket", "tau(0,pt)", "--beta-sq-half", "0", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "1");
}

#[test]
fn fit_and_virasoro_json() {
    let o = k3gw(&["fit", "--family", "tau(k,pt) tau(l,pt)", "--beta-sq-half", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["polynomial"], "8*k^2 + 8*l^2 - 12*k - 12*l + 20");
    let o = k3gw(&["virasoro", "--k", "3", "--verify"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["w"], serde_json::json!({ "0": "3", "1": "-27/4" }));
}

#[test]
fn output_is_deterministic() {
    let args = ["invariant", "--bracket", "tau(3,one) tau(1,e1) tau(2,f1)", "--beta-sq-half", "1", "--series"];
    assert_eq!(k3gw(&args).stdout, k3gw(&args).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(k3gw(&["nonsense"]).status.code(), Some(1));
    assert_eq!(k3gw(&["invariant", "--bracket", "tau(1,", "--beta-sq-half", "0"]).status.code(), Some(1));
    assert_eq!(k3gw(&["virasoro", "--k", "1"]).status.code(), Some(1));
    let pairs: Vec<String> = (1..=10).map(|p| format!("tau(1,e{p}) tau(1,f{p})")).collect();
    let b = format!("tau(2,one) {}", pairs.join(" "));
    let o = k3gw(&["invariant", "--bracket", &b, "--beta-sq-half", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unused hyperbolic pair"));
    let o = k3gw(&["virasoro", "--k", "2", "--convention", "literal", "--verify"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn cache_round_trip() {
    let dir = std::env::temp_dir().join(format!("k3gw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("memo");
    let args = ["invariant", "--bracket", "tau(4,one) tau(2,pt)", "--beta-sq-half", "2"];
    let run = || Command::new(env!("CARGO_BIN_EXE_k3gw")).args(args).env("K3GW_CACHE", &path).output().unwrap();
    let cold = run();
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("k3gw-cache v1\n"));
    let warm = run();
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stdout, k3gw(&args).stdout);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn selftest_subset() {
    let o = k3gw(&["selftest", "--only", "1,9"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
}
