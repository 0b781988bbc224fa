use std::process::Command;

fn zicr(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_zicr")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = zicr(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn capacity_json() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&["capacity", "--snr21_db", "-20"])).unwrap();
    let sum = v["sum_capacity"].as_f64().unwrap();
    assert!((sum - 2.5682).abs() < 1e-4);
    assert_eq!(v["certified"], true);
    assert_eq!(v["relay_condition"], true);
    assert!(v["certificate"]["beta1"].is_number());
    assert!(v["genie_ub"]["value"].as_f64().unwrap() >= sum);
    assert!(v["cutset"]["r2_bound"].is_number());
}

#[test]
fn gdof_json() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&["gdof", "--alpha", "0", "--lambda", "0"])).unwrap();
    assert_eq!(v["lower"], 3.0);
    assert_eq!(v["max_certified"], 3.0);
    assert_eq!(v["conditions_hold"], true);
}

#[test]
fn sweeps_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        stdout(&["sweep-fig3", "--seed", "7", "--out", p.to_str().unwrap()]);
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(text).unwrap().lines().count(), 72);
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.json");
    std::fs::write(&cfg, r#"{"beta": 2.0, "gamma": 2.0, "points": 5}"#).unwrap();
    let text = stdout(&["sweep-fig5", "--config", cfg.to_str().unwrap(), "--points", "3"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,gdof_lower,gdof_upper,upper_valid,zic_bound,max_certified");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "0,3,3,true,2,3");
    assert_eq!(lines[2], "0.5,2,2,false,2,");
}

#[test]
fn relay_region_csv() {
    let text = stdout(&["relay-region", "--grid", "20"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,inside");
    assert_eq!(lines.len(), 401);
    assert!(lines.iter().any(|l| l.ends_with(",true")));
}

#[test]
fn bad_input_exits_nonzero() {
    assert_eq!(zicr(&["capacity", "--snr11", "-1"]).status.code(), Some(2));
    assert_eq!(zicr(&["capacity", "--config", "/nonexistent.json"]).status.code(), Some(2));
    assert!(!zicr(&["nonsense"]).status.success());
}
