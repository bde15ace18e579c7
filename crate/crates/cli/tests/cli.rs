use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_closurelab")).args(args).env_remove("CLOSURELAB_SEED").output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn laguerre_closure_passes() {
    let o = run(&["verify-closure", "--family", "L", "--D", "1I", "--Y", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("R=-1024; 0; 80; 0"), "{text}");
    assert!(text.contains(" 0 failed"));
}

#[test]
fn bad_configuration_exits_2() {
    for args in [
        &["verify-closure", "--family", "Q"][..],
        &["verify-closure", "--D", "1X"],
        &["verify-closure", "--Y", "0"],
        &["verify-closure", "--K", "3"],
        &["verify-closure", "--family", "W", "--mode", "symbolic"],
        &["verify-closure", "--family", "J", "--D", "2I", "--params", "a=2,b=1"],
        &["verify-closure", "--family", "J", "--D", "1I", "--params", "a=11/2,b=9/2"],
        &["plugin-validate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn failed_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"family":"L"}"#).unwrap();
    let o = run(&["plugin-validate", "--plugin", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL plugin.load"));
}

#[test]
fn wilson_without_plugin_is_skipped_with_notice() {
    let o = run(&["verify-closure", "--family", "W", "--D", "1I", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let solve = v["checks"].as_array().unwrap().iter().find(|c| c["id"] == "closure.solve").unwrap();
    assert_eq!(solve["status"], "skip");
    assert_eq!(solve["values"]["reason"], "operator-level: plugin required");
}

#[test]
fn appendix_b_skips_plugin_rows_without_plugins() {
    let v = json(&run(&["appendix-b", "--json"]));
    let checks = v["checks"].as_array().unwrap();
    let regen: Vec<_> = checks.iter().filter(|c| c["id"] == "appendix-b.regenerate").collect();
    assert_eq!(regen.len(), 27);
    let skipped = regen.iter().filter(|c| c["status"] == "skip").count();
    assert_eq!(skipped, 21);
    assert!(regen.iter().all(|c| c["status"] != "fail"));
    assert!(checks.iter().filter(|c| c["id"] == "appendix-b.transcription").all(|c| c["status"] == "pass"));
}

#[test]
fn appendix_b_with_plugin_regenerates_row() {
    let o = run(&["appendix-b", "--family", "L", "--D", "2I", "--plugin", &fixture("L_2I.json"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let regen: Vec<_> = v["checks"].as_array().unwrap().iter().filter(|c| c["id"] == "appendix-b.regenerate").cloned().collect();
    assert_eq!(regen.len(), 1);
    assert_eq!(regen[0]["status"], "pass");
    assert_eq!(regen[0]["values"]["printed_match"], "true");
}

#[test]
fn plugin_system_drives_single_commands() {
    let o = run(&["verify-closure", "--plugin", &fixture("W_classical.json"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["config"]["family"], "Wilson");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = ["spectrum", "--family", "J", "--D", "1I", "--random", "10"];
    for p in [&a, &b] {
        let mut v: Vec<&str> = args.to_vec();
        v.extend(["--report", p.to_str().unwrap()]);
        assert_eq!(run(&v).status.code(), Some(0));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn seed_changes_random_spectra() {
    let base = ["spectrum", "--family", "L", "--random", "5", "--json"];
    let o0 = run(&base);
    let o1 = Command::new(env!("CARGO_BIN_EXE_closurelab")).args(base).env("CLOSURELAB_SEED", "7").output().unwrap();
    assert_eq!(o1.status.code(), Some(0));
    assert_eq!(json(&o1)["config"]["seed"], 7);
    assert_ne!(o0.stdout, o1.stdout);
}

#[test]
fn recurrence_and_heisenberg_pass() {
    for args in [
        &["recurrence", "--family", "L", "--D", "1II", "--n-max", "6"][..],
        &["recurrence", "--family", "J", "--D", "1I", "--n-max", "4"],
        &["heisenberg", "--family", "J", "--D", "1II", "--n-max", "4"],
        &["heisenberg", "--family", "L", "--Y", "eta", "--n-max", "4"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}\n{}", stdout(&o));
    }
}
