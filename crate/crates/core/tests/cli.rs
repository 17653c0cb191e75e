use std::path::Path;
use std::process::{Command, Output};

fn qharm(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qharm"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("QHARM_THREADS", t),
        None => cmd.env_remove("QHARM_THREADS"),
    };
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"seed\": ");
    for cmd in ["verify-identities", "build-algebra", "max-principle", "recover"] {
        let out = qharm(&[cmd, "--config", &bad], None);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("parse"));
        assert!(out.stdout.is_empty());
    }
    let missing = dir.path().join("missing.json");
    let out = qharm(&["recover", "--config", missing.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    let typo = write(dir.path(), "typo.json", r#"{"sead": 1}"#);
    assert_eq!(qharm(&["recover", "--config", &typo], None).status.code(), Some(2));
}

#[test]
fn bad_thread_count_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"points": []}"#);
    assert_eq!(qharm(&["recover", "--config", &cfg], Some("zero")).status.code(), Some(2));
    assert_eq!(qharm(&["recover", "--config", &cfg], Some("2")).status.code(), Some(0));
}

#[test]
fn verify_identities_polynomial_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.json", r#"{"seed": 1, "samples": 10}"#);
    let out = qharm(&["verify-identities", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["backend"], "polynomial");
    assert!(r["identities"].as_array().unwrap().iter().all(|i| i["exact"] == true));

    let cfg = write(dir.path(), "g.json", r#"{"seed": 1, "samples": 2, "backend": "grid"}"#);
    let out = qharm(&["verify-identities", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(0));
    for id in report(&out)["identities"].as_array().unwrap() {
        for s in id["samples"].as_array().unwrap() {
            let ratio = s["ratio"].as_f64().unwrap();
            assert!((3.0..=5.0).contains(&ratio), "{id}");
        }
    }
}

#[test]
fn build_algebra_writes_csv_and_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv_dir = dir.path().join("fields");
    let cfg = format!(
        r#"{{"elements": [
            {{"kind": "planar", "omega": [0, 0, 1], "coeffs": [[0, 0], [1, 0]]}},
            {{"kind": "planar", "omega": [0, 0, 1], "coeffs": [[0, 0], [0, 0], [1, 0]]}},
            {{"kind": "planar", "omega": [0, 0, 1], "coeffs": [[0, 0], [0, 0], [0, 0], [1, 0]]}}],
            "csv_dir": {:?}}}"#,
        csv_dir.to_str().unwrap()
    );
    let cfg = write(dir.path(), "b.json", &cfg);
    let out_path = dir.path().join("report.json");
    let out = qharm(&["build-algebra", "--config", &cfg, "--out", out_path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    assert_eq!(r["products"].as_array().unwrap().len(), 6);
    let csv = std::fs::read_to_string(csv_dir.join("element_1.csv")).unwrap();
    assert!(csv.starts_with("x1,x2,x3,re,v1,v2,v3,boundary"));
    assert!(csv_dir.join("product_0_2.csv").exists());
}

#[test]
fn build_algebra_pole_inside_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "r.json", r#"{"elements": [{"kind": "radial", "pole": [0, 0, 0], "coeffs": [[1, 0]]}]}"#);
    let out = qharm(&["build-algebra", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pole"));
}

#[test]
fn max_principle_constant_and_bump() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.json", r#"{"count": 2}"#);
    let out = qharm(&["max-principle", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let records = r["records"].as_array().unwrap();
    let bump = records.iter().find(|x| x["label"].as_str().unwrap().starts_with("bump")).unwrap();
    assert_eq!(bump["max_principle"], false);
    assert_eq!(bump["pass"], true);
}

#[test]
fn recover_adversarial_warns_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "a.json",
        r#"{"count": 5, "functionals": [{"kind": "mixture", "points": [[0.5, 0, 0], [0, 0.5, 0]], "weights": [0.5, 0.5]}]}"#,
    );
    let out = qharm(&["recover", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["warnings"].as_array().unwrap().len(), 1);
    assert_eq!(r["max_recovery_error"], 0.0);

    let empty = write(dir.path(), "e.json", r#"{"points": []}"#);
    let out = qharm(&["recover", "--config", &empty], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["entries"].as_array().unwrap().is_empty());
}
