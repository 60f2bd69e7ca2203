use std::path::Path;
use std::process::Command;

fn spine(args: &[&str], out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_spine"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("run spine");
    (
        o.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&o.stdout).into_owned(),
    )
}

const NEIGHBOURHOOD: [&str; 10] = ["--q", "3", "--n", "5", "--k", "2", "--m", "1", "--w", "2"];

fn with<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend(NEIGHBOURHOOD);
    v.extend(extra);
    v
}

#[test]
fn verify_all_reports_are_byte_identical_and_cache_neutral() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let (code, stdout) = spine(&with("verify-all", &["--seed", "3"]), &a);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("[PASS] neighbourhood-homology-breaks-bundles"));
    // second run in `a` reads the cache; `b` recomputes
    assert_eq!(spine(&with("verify-all", &["--seed", "3"]), &a).0, 0);
    assert_eq!(
        spine(&with("verify-all", &["--seed", "3", "--no-cache"]), &b).0,
        0
    );
    let name = "q3-n5-k2-m1-w2-verify-all.json";
    let ra = std::fs::read(a.join(name)).unwrap();
    let rb = std::fs::read(b.join(name)).unwrap();
    assert_eq!(ra, rb);
    assert!(a.join("q3-n5-k2-m1-w2-verify-all.timings.json").exists());
}

#[test]
fn counterexample_exhibits_witness() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = spine(&with("counterexample", &[]), dir.path());
    assert_eq!(code, 0);
    let text =
        std::fs::read_to_string(dir.path().join("q3-n5-k2-m1-w2-counterexample.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let w = &v["check"]["stats"]["witness"];
    assert_ne!(w["U"], w["U_prime"]);
    assert_eq!(v["check"]["stats"]["pi_violations"], 0);
    assert_eq!(v["check"]["stats"]["rho_violations"], 0);
}

#[test]
fn gate_and_configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(spine(&with("reconstruct", &[]), dir.path()).0, 2);
    let q2 = [
        "counterexample",
        "--q",
        "2",
        "--n",
        "5",
        "--k",
        "2",
        "--m",
        "1",
        "--w",
        "2",
    ];
    assert_eq!(spine(&q2, dir.path()).0, 2);
    assert_eq!(spine(&["build", "--n", "3"], dir.path()).0, 2);
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"q": 2, "colour": 1}"#).unwrap();
    assert_eq!(
        spine(&["build", "--config", cfg.to_str().unwrap()], dir.path()).0,
        2
    );
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"q": 2, "n": 5, "k": 2, "m": 1, "w": 3}"#).unwrap();
    let (code, _) = spine(
        &["build", "--config", cfg.to_str().unwrap(), "--w", "2"],
        dir.path(),
    );
    assert_eq!(code, 0);
    assert!(dir.path().join("q2-n5-k2-m1-w2-space.json").exists());
}

#[test]
fn relation_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = spine(&with("relations", &["--delta", "rho"]), dir.path());
    assert_eq!(code, 0);
    let text =
        std::fs::read_to_string(dir.path().join("q3-n5-k2-m1-w2-relation-rho.json")).unwrap();
    let g =
        spine_core::relations::LineRelationGraph::from_json(&serde_json::from_str(&text).unwrap())
            .unwrap();
    assert_eq!(g.kind, spine_core::relations::DeltaKind::Rho);
    assert!(g.edge_count() > 0);
}
