use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dendro(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dendro")).args(args).current_dir(dir).output().expect("binary runs")
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dendro-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn fixtures_list() {
    let out = dendro(&std::env::temp_dir(), &["fixtures", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["c2-quotient", "e-nerve", "wedge-glue"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn check_ez_passes() {
    let out = dendro(&std::env::temp_dir(), &["check-ez", "--site", "omega", "--max-degree", "3", "--arity-cap", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["bounds"]["max_degree"], 3);
    for site in ["simplex", "finset", "gamma", "cyclic3", "symmetric3"] {
        assert_eq!(dendro(&std::env::temp_dir(), &["check-ez", "--site", site]).status.code(), Some(0), "{site}");
    }
}

#[test]
fn malformed_input_is_an_input_error() {
    let dir = scratch("bad");
    std::fs::write(dir.join("bad.dpsh"), "tree { edges: [a, b]; root: a; vertex v { in: [b] out: a } }\n").unwrap();
    let out = dendro(&dir, &["validate", "bad.dpsh"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error at 1:"));
    assert_eq!(dendro(&dir, &["validate", "missing.dpsh"]).status.code(), Some(3));
    assert_eq!(dendro(&dir, &["fixtures", "nope"]).status.code(), Some(3));
    assert_eq!(dendro(&dir, &["frobnicate"]).status.code(), Some(3));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn quotient_fails_validation() {
    let dir = scratch("quot");
    assert_eq!(dendro(&dir, &["fixtures", "c2-quotient", "--emit", "q.dmap"]).status.code(), Some(0));
    let out = dendro(&dir, &["validate", "q.dmap", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "fail");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn budget_exhaustion() {
    let dir = scratch("budget");
    assert_eq!(dendro(&dir, &["fixtures", "e-over-point", "--max-degree", "3", "--emit", "e.dmap"]).status.code(), Some(0));
    let out = dendro(&dir, &["check-fibration", "e.dmap", "--family", "inner", "--max-degree", "3", "--budget", "1", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "budget");
    let ok = dendro(&dir, &["check-fibration", "e.dmap", "--family", "left", "--max-degree", "3", "--arity-cap", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn minimize_emits_model_and_retraction() {
    let dir = scratch("min");
    dendro(&dir, &["fixtures", "e-over-point", "--max-degree", "3", "--emit", "e.dmap"]);
    let out = dendro(&dir, &["minimize", "e.dmap", "--max-degree", "2", "--emit", "M.dpsh", "r.dmap", "report.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(dendro(&dir, &["validate", "M.dpsh"]).status.code(), Some(0));
    assert_eq!(dendro(&dir, &["validate", "r.dmap"]).status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "pass");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn glue_and_skeleton() {
    let dir = scratch("glue");
    dendro(&dir, &["fixtures", "wedge-glue", "--max-degree", "3", "--emit", "w.dglue"]);
    let out = dendro(&dir, &["glue", "w.dglue", "--max-degree", "2", "--emit", "q.dmap"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(dendro(&dir, &["validate", "q.dmap"]).status.code(), Some(0));
    dendro(&dir, &["fixtures", "e-nerve", "--max-degree", "3", "--emit", "e.dpsh"]);
    let sk = dendro(&dir, &["skeleton", "e.dpsh", "--max-degree", "1"]);
    assert_eq!(sk.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&sk.stdout).contains("presheaf"));
    let _ = std::fs::remove_dir_all(dir);
}
