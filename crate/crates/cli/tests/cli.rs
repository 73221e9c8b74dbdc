use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn tourney(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tourney")).args(args).output().expect("run tourney")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tourney-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn binom_counts_are_exact() {
    let out = tourney(&["binom-mod", "--n", "12", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "binom-mod");
    assert_eq!(v["result"]["counts_over_2n"], serde_json::json!([1366, 1365, 1365]));
    assert!(stderr(&out).contains("residue 0: 1366/4096"));
}

#[test]
fn sumner_summary_and_exit_codes() {
    let out = tourney(&["verify-sumner", "--host", "6", "--tree", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("0 counterexamples / 32768 hosts"));
    // the out-star with two leaves is missing from the 3-cycle
    let out = tourney(&["verify-sumner", "--host", "3", "--tree", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["ok"], false);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(tourney(&["bogus"]).status.code(), Some(2));
    assert_eq!(tourney(&["hampath", "--input", "/nonexistent/host.json"]).status.code(), Some(2));
    assert_eq!(tourney(&["binom-mod", "--n", "five", "--k", "3"]).status.code(), Some(2));
    let bad = scratch("bad-preset.json");
    std::fs::write(&bad, "{\"version\": 1}").unwrap();
    assert_eq!(tourney(&["--preset", bad.to_str().unwrap(), "binom-mod", "--n", "4", "--k", "3"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_one() {
    let out = tourney(&["binom-mod", "--n", "3", "--k", "5", "--tol", "0.01"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["within_tolerance"], false);
}

#[test]
fn json_out_matches_stdout() {
    let path = scratch("hampath.json");
    let to_file = tourney(&["--json-out", path.to_str().unwrap(), "hampath", "--n", "50", "--seed", "4"]);
    assert!(to_file.stdout.is_empty());
    let printed = tourney(&["hampath", "--n", "50", "--seed", "4"]);
    assert_eq!(std::fs::read(&path).unwrap(), printed.stdout);
    assert!(stderr(&printed).contains("wall time"));
    assert!(!String::from_utf8_lossy(&printed.stdout).contains("wall"));
}

#[test]
fn generated_files_feed_back_in() {
    let host = scratch("host.json");
    let tree = scratch("tree.json");
    std::fs::write(&host, tourney(&["gen", "tournament", "--n", "30", "--seed", "2"]).stdout).unwrap();
    std::fs::write(&tree, tourney(&["gen", "tree", "--n", "12", "--seed", "2"]).stdout).unwrap();
    let out = tourney(&["embed", "--mode", "exact", "--tree", tree.to_str().unwrap(), "--host", host.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("1 / 1 embeddings succeeded"));
    let out = tourney(&["hampath", "--input", host.to_str().unwrap()]);
    assert_eq!(json(&out)["result"]["valid"], true);
}

#[test]
fn csv_has_one_row_per_run() {
    let path = scratch("alloc.csv");
    let out = tourney(&["alloc-stats", "--n", "500", "--k", "4", "--runs", "6", "--csv", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].contains("max_ratio") && lines[0].contains("semi_canonical"));
}

#[test]
fn preset_hash_follows_the_file() {
    let default = json(&tourney(&["binom-mod", "--n", "4", "--k", "3"]));
    let shipped = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets/desk.json")).unwrap();
    let copy = scratch("desk-copy.json");
    std::fs::write(&copy, format!("{shipped}\n")).unwrap();
    let custom = json(&tourney(&["--preset", copy.to_str().unwrap(), "binom-mod", "--n", "4", "--k", "3"]));
    assert_eq!(default["preset"]["name"], "desk");
    assert_eq!(default["preset"]["sha256"].as_str().unwrap().len(), 64);
    assert_ne!(default["preset"]["sha256"], custom["preset"]["sha256"]);
    assert_eq!(default["result"], custom["result"]);
}

#[test]
fn embed_main_batch_is_reproducible() {
    let args = ["embed", "--mode", "main", "--n", "200", "--runs", "4", "--family", "transitive", "--seed", "3"];
    let a = tourney(&args);
    let b = tourney(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stderr(&a).contains("4 / 4 embeddings succeeded"));
}
