use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};
use systematic_k::cli::{run, ExperimentConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_systematic-k"))
}

fn write_config(dir: &tempfile::TempDir, name: &str, v: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path
}

fn f2t_window(slots: Value) -> Value {
    json!({
        "command": "kzero-window",
        "seed": 7,
        "group": {"kind": "free_abelian", "rank": 1},
        "ring": {"kind": "monoid_ring", "base": "F2", "support_cone": [[1]]},
        "window": {"slots": slots},
        "budget": {"samples": 10}
    })
}

fn read_report(path: &PathBuf) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("timings_ms");
    v
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "c.json", &json!({
        "command": "verify-identities",
        "seed": 4,
        "group": {"kind": "free_abelian", "rank": 1},
        "ring": {"kind": "monoid_ring", "base": "Z/4", "support_cone": [[1]]},
        "window": {"slots": [0, 1, 2]},
        "budget": {"samples": 20}
    }));
    let outs: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("r{i}.json"))).collect();
    for out in &outs {
        let status = bin().arg("run").arg(&cfg).arg("--out").arg(out).status().unwrap();
        assert_eq!(status.code(), Some(0));
    }
    assert_eq!(read_report(&outs[0]), read_report(&outs[1]));
    let other = dir.path().join("r2.json");
    bin().arg("run").arg(&cfg).args(["--seed", "99"]).arg("--out").arg(&other).status().unwrap();
    let r = read_report(&other);
    assert_eq!(r["seed"], json!(99));
    assert_ne!(r, read_report(&outs[0]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = dir.path().join("bad.json");
    std::fs::write(&bad_json, "{ not json").unwrap();
    assert_eq!(bin().arg("run").arg(&bad_json).status().unwrap().code(), Some(2));
    let unknown = write_config(&dir, "u.json", &json!({"command": "fly", "ring": {"kind": "power_localization", "s": 2}, "window": {}}));
    assert_eq!(bin().arg("run").arg(&unknown).status().unwrap().code(), Some(2));
    assert_eq!(bin().arg("run").arg(dir.path().join("missing.json")).status().unwrap().code(), Some(2));
    // a semidirect theorem on a plain lattice is a failed check, not a config error
    let mut wrong = f2t_window(json!([0, 1]));
    wrong["command"] = json!("thm-semidirect");
    let wrong = write_config(&dir, "w.json", &wrong);
    let out = bin().arg("run").arg(&wrong).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], json!(false));
    assert_eq!(report["replay"]["seed"], json!(7));
}

#[test]
fn polynomial_window_has_rank_three() {
    let r = run(&ExperimentConfig::from_json(&f2t_window(json!([0, 1, 2]))).unwrap());
    assert!(r.passed);
    assert_eq!(r.json["results"]["rank"], json!(3));
    let empty = run(&ExperimentConfig::from_json(&f2t_window(json!([]))).unwrap());
    assert!(empty.passed);
    assert_eq!(empty.json["results"]["rank"], json!(0));
}

#[test]
fn counterexample_report() {
    let cfg = json!({"command": "counterexamples", "seed": 1, "ring": {"kind": "power_localization", "s": 2}, "window": {}});
    let r = run(&ExperimentConfig::from_json(&cfg).unwrap());
    assert!(r.passed);
    assert_eq!(r.json["results"]["after_zero"], json!(true));
    assert_eq!(r.json["results"]["rho_onto"], json!(false));
    assert_eq!(r.json["results"]["rho_component"], json!([["2"]]));
}

#[test]
fn shipped_configs_pass() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let r = run(&cfg);
        assert!(r.passed, "{}: {}", path.display(), r.summary());
        n += 1;
    }
    assert!(n >= 9);
}

#[test]
fn selftest_subcommand_prints_nine_lines() {
    let out = bin().arg("selftest").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("criterion")).count(), 9);
    assert_eq!(out.status.code(), Some(0), "{text}");
}
