use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn robusteq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robusteq"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn matching(dir: &TempDir, players: usize, extra: &[&str]) -> PathBuf {
    let path = dir.path().join(format!("matching{players}{}.json", extra.len()));
    let players = players.to_string();
    let mut args = vec!["gen", "--builtin", "matching", "--players", &players, "--actions", "3"];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out", path.to_str().unwrap()]);
    assert_eq!(code(&robusteq(&args)), 0);
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn index_of_a_pure_matching_profile() {
    let dir = TempDir::new().unwrap();
    let game = matching(&dir, 5, &[]);
    let chain = dir.path().join("chain.json");
    let out = robusteq(&["index", "--game", s(&game), "--profile", "pure:1", "--out", s(&chain)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "2\n");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&chain).unwrap()).unwrap();
    assert_eq!(doc["defection_index"], 2);
    assert_eq!(doc["chain"].as_array().unwrap().len(), 4);
    assert_eq!(doc["chain"][3]["robust"], false);

    let table = matching(&dir, 5, &["--expand"]);
    let out = robusteq(&["index", "--game", s(&table), "--profile", "pure:3"]);
    assert_eq!(stdout(&out), "2\n");
}

#[test]
fn verify_reports_witnesses() {
    let dir = TempDir::new().unwrap();
    let game = matching(&dir, 5, &[]);
    let out = robusteq(&["verify", "--game", s(&game), "--alpha", "3", "--profile", "pure:1"]);
    assert_eq!(code(&out), 1);
    let doc = json(&out);
    assert_eq!(doc["robust"], false);
    assert_eq!(doc["cases"][0]["witness"]["config"], serde_json::json!([0, 3, 0]));
    assert_eq!(doc["cases"][0]["witness"]["deviation"], "2");

    let out = robusteq(&[
        "verify",
        "--game",
        s(&game),
        "--alpha",
        "0",
        "--profile",
        "mixed:1/2,1/4,1/4",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["cases"][0]["witness"]["deviation"], "1");

    let out = robusteq(&[
        "verify",
        "--game",
        s(&game),
        "--alpha",
        "2",
        "--profile",
        "pure:2",
        "--oracle",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["oracle_agrees"], true);
    assert_eq!(doc["oracle"][0]["samples"], 100);
}

#[test]
fn verify_accepts_profile_files() {
    let dir = TempDir::new().unwrap();
    let game = matching(&dir, 3, &[]);
    let profile = dir.path().join("split.json");
    std::fs::write(&profile, r#"{"strategies": [[1, 0, 0], [1, 0, 0], [0, 1, 0]]}"#).unwrap();
    let out = robusteq(&[
        "verify",
        "--game",
        s(&game),
        "--alpha",
        "0",
        "--profile",
        s(&profile),
        "--oracle",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["oracle_agrees"], true);

    std::fs::write(&profile, r#"{"strategies": [[1, 0, 0], [1, 0, 0], [1, 0, 0]]}"#).unwrap();
    let out = robusteq(&[
        "verify",
        "--game",
        s(&game),
        "--alpha",
        "1",
        "--profile",
        s(&profile),
        "--oracle",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn canonical_output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let game = matching(&dir, 5, &[]);
    let args = [
        "verify",
        "--game",
        s(&game),
        "--alpha",
        "2",
        "--profile",
        "pure:1",
        "--canonical",
        "--oracle",
    ];
    let (a, b) = (robusteq(&args), robusteq(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 1);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"n_players\": 3,\n  \"actions\": [\"a\"\n").unwrap();
    let out = robusteq(&["index", "--game", s(&bad), "--profile", "pure:a"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let game = matching(&dir, 5, &[]);
    let out = robusteq(&["index", "--game", s(&game), "--profile", "pure:9"]);
    assert_eq!(code(&out), 2);

    let out = Command::new(env!("CARGO_BIN_EXE_robusteq"))
        .args(["scan", "--game", s(&game), "--alpha", "1", "--grid", "6"])
        .env("ROBUSTEQ_MAX_COMPOSITIONS", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_compositions"));
}

#[test]
fn scan_matches_golden_grid() {
    let dir = TempDir::new().unwrap();
    let game = matching(&dir, 5, &[]);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/scan_matching_n5_r6_a1.csv");
    let out = robusteq(&["scan", "--game", s(&game), "--alpha", "1", "--grid", "6"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out)
        .lines()
        .eq(std::fs::read_to_string(golden).unwrap().lines()));
}

#[test]
fn solve_and_check() {
    let dir = TempDir::new().unwrap();
    let three = matching(&dir, 3, &[]);
    let out = robusteq(&["solve", "--game", s(&three), "--alpha", "1"]);
    assert_eq!(code(&out), 0);
    let found = json(&out)["pure"]["robust_profiles"].as_array().unwrap().len();
    assert_eq!(found, 3);
    assert_eq!(code(&robusteq(&["solve", "--game", s(&three), "--alpha", "2"])), 1);

    let five = matching(&dir, 5, &[]);
    let out = robusteq(&[
        "solve",
        "--game",
        s(&five),
        "--alpha",
        "0",
        "--init",
        "mixed:9/10,1/20,1/20",
    ]);
    assert_eq!(json(&out)["dynamics"]["dynamics"]["outcome"], "converged");

    let out = robusteq(&[
        "check",
        "--game",
        s(&five),
        "--alpha",
        "3",
        "--profile",
        "pure:1",
        "--base",
        "3,0,0",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["sensitivity"][0]["holds"], false);
    let out = robusteq(&["check", "--game", s(&five), "--alpha", "0", "--profile", "pure:1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["direction"]["invariant"], true);
}
