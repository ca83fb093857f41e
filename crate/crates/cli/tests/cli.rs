use std::path::Path;
use std::process::{Command, Output};

use binmat::catalog::{build, list_patterns};
use binmat::detect::canonical_form;
use binmat::Matroid;
use serde_json::Value;

fn binmat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binmat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_of(o: &Output) -> Value {
    let v: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("invalid JSON ({e}): {}", stdout(o)));
    assert_eq!(v["schema_version"], 1);
    v
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_then_info() {
    let dir = tempfile::tempdir().unwrap();
    let kite = dir.path().join("kite.mat");
    let o = binmat(&["construct", "--pattern", "kite", "-o", path(&kite)]);
    assert!(o.status.success());
    let o = binmat(&["info", path(&kite)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("dim 6"), "{text}");
    assert!(text.contains("|E| 10"), "{text}");
    assert!(text.contains("full-rank"), "{text}");
    let v = json_of(&binmat(&["--json", "info", path(&kite)]));
    assert_eq!(v["dim"], 6);
    assert_eq!(v["size"], 10);
    assert_eq!(v["full_rank"], true);
}

#[test]
fn check_reports_freeness_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let kite = dir.path().join("kite.mat");
    assert!(binmat(&["construct", "--pattern", "kite", "-o", path(&kite)]).status.success());
    let o = binmat(&["check", "--free", "I5,triangle", path(&kite)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("free: yes"));
    // the kite contains AG3: reported, and exit 1 only with --expect-free
    let o = binmat(&["check", "--free", "AG3", path(&kite)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("free: no"));
    let o = binmat(&["check", "--free", "AG3", "--expect-free", path(&kite)]);
    assert_eq!(o.status.code(), Some(1));
    let v = json_of(&binmat(&["--json", "check", "--free", "AG3,I5", path(&kite)]));
    assert_eq!(v["free"], false);
    assert_eq!(v["patterns"][0]["present"], true);
    assert!(v["patterns"][0]["witness"].is_object());
    assert_eq!(v["patterns"][1]["present"], false);
}

#[test]
fn search_main_case_dimension_six() {
    let o = binmat(&["--json", "search", "--dim", "6", "--forbid", "I5,triangle", "--full-rank", "--classify"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["min_size"], 8);
    assert_eq!(v["extremal"].as_array().unwrap().len(), 1);
    assert_eq!(v["exhaustive"], true);
}

#[test]
fn search_with_forcing() {
    let v = json_of(&binmat(&["--json", "search", "--dim", "5", "--forbid", "I5,triangle", "--full-rank", "--force", "C5"]));
    assert_eq!(v["min_size"], 6);
}

#[test]
fn verify_exit_codes() {
    let o = binmat(&["verify", "--claim", "MAIN-THM", "--r", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("pass MAIN-THM"), "{}", stdout(&o));
    let v = json_of(&binmat(&["--json", "verify", "--claim", "count-flats", "--n", "5", "--k", "2", "--l", "2"]));
    assert_eq!(v["results"][0]["status"], "pass");
    assert_eq!(v["fail"], 0);
    assert_eq!(binmat(&["verify", "--claim", "NO-SUCH"]).status.code(), Some(2));
    assert_eq!(binmat(&["verify", "--claim", "MAIN-THM", "--r", "1"]).status.code(), Some(2));
    let v = json_of(&binmat(&["--json", "verify", "--list"]));
    assert_eq!(v["claims"].as_array().unwrap().len(), 18);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(binmat(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(binmat(&["construct", "--pattern", "I0"]).status.code(), Some(2));
    assert_eq!(binmat(&["construct", "--pattern", "bogus"]).status.code(), Some(2));
    assert_eq!(binmat(&["info", "/no/such/file"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mat");
    std::fs::write(&bad, "dim 3\npoints 1 2 9\n").unwrap();
    assert_eq!(binmat(&["info", path(&bad)]).status.code(), Some(2));
    let m = dir.path().join("m.mat");
    std::fs::write(&m, "dim 3\npoints 1 2 4\n").unwrap();
    assert_eq!(binmat(&["contract", path(&m), "--flat", "8"]).status.code(), Some(2));
}

#[test]
fn contract_and_restrict() {
    let dir = tempfile::tempdir().unwrap();
    let kite = dir.path().join("kite.mat");
    assert!(binmat(&["construct", "--pattern", "kite", "-o", path(&kite)]).status.success());
    let v = json_of(&binmat(&["--json", "restrict", path(&kite), "--flat", "1,2,4"]));
    assert_eq!(v["matroid"]["dim"], 3);
    assert_eq!(v["matroid"]["points"].as_array().unwrap().len(), 4);
    let out = dir.path().join("c.mat");
    assert!(binmat(&["contract", path(&kite), "--flat", "1,2,4", "-o", path(&out)]).status.success());
    let c = Matroid::parse_any(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let k = build("kite".parse().unwrap()).unwrap();
    let expected = k.contract(&binmat::Flat::span(6, [1, 2, 4])).unwrap();
    assert_eq!(c, expected);
}

#[test]
fn iso_and_canon() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mat");
    let b = dir.path().join("b.mat");
    std::fs::write(&a, "dim 3\npoints 1 2 4\n").unwrap();
    std::fs::write(&b, "{\"dim\": 3, \"points\": [3, 5, 6]}").unwrap();
    let v = json_of(&binmat(&["--json", "iso", path(&a), path(&b)]));
    assert_eq!(v["isomorphic"], false);
    std::fs::write(&b, "{\"dim\": 3, \"points\": [3, 5, 7]}").unwrap();
    let v = json_of(&binmat(&["--json", "iso", path(&a), path(&b)]));
    assert_eq!(v["isomorphic"], true);
    assert_eq!(v["map"].as_array().unwrap().len(), 3);
}

#[test]
fn construct_serialize_parse_canon_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (p, _) in list_patterns() {
        let direct = canonical_form(&build(p).unwrap());
        for fmt in ["text", "json"] {
            let file = dir.path().join(format!("p.{fmt}"));
            let name = p.to_string();
            assert!(binmat(&["construct", "--pattern", &name, "--format", fmt, "-o", path(&file)]).status.success());
            let v = json_of(&binmat(&["--json", "canon", path(&file)]));
            assert_eq!(v["canonical"]["points"], serde_json::to_value(&direct.points).unwrap(), "{name} {fmt}");
        }
    }
}

#[test]
fn config_file_and_seed_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("binmat.toml");
    std::fs::write(&cfg, "seed = 7\ntrials = 50\n").unwrap();
    let a = json_of(&binmat(&["--json", "--config", path(&cfg), "verify", "--claim", "AFF-ODD", "--n", "5"]));
    let b = json_of(&binmat(&["--json", "--seed", "7", "verify", "--claim", "AFF-ODD", "--n", "5", "--trials", "50"]));
    assert_eq!(a["results"][0]["trials"], 50);
    assert_eq!(a["results"][0]["seed"], 7);
    assert_eq!(a["results"][0]["hypothesis_hits"], b["results"][0]["hypothesis_hits"]);
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(binmat(&["--config", path(&cfg), "verify", "--list"]).status.code(), Some(2));
}

#[test]
fn max_dim_guard() {
    let o = Command::new(env!("CARGO_BIN_EXE_binmat"))
        .args(["search", "--dim", "6", "--forbid", "I5"])
        .env("BINMAT_MAX_DIM", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
