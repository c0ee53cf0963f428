//! End-to-end checks of the command line surface: subcommands, file formats,
//! exit codes, and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ladders"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ladders-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const M3: &str = r#"{
  "elements": ["bot", "a0", "a1", "a2", "top"],
  "relation_kind": "covers",
  "pairs": [["bot","a0"],["bot","a1"],["bot","a2"],["a0","top"],["a1","top"],["a2","top"]]
}"#;

#[test]
fn check_reports_ladder_and_breadth() {
    let dir = workdir("check");
    let m3 = write(&dir, "m3.json", M3);
    let out = bin()
        .args(["check", m3.to_str().unwrap(), "--ladder", "3", "--breadth"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("3-ladder: pass"), "{text}");
    assert!(text.contains("breadth: 2"), "{text}");
}

#[test]
fn failing_verdict_keeps_status_zero_unless_strict() {
    let dir = workdir("strict");
    let m3 = write(&dir, "m3.json", M3);
    let out = bin()
        .args(["check", m3.to_str().unwrap(), "--ladder", "2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "verdict fail still exits 0");
    assert!(stdout(&out).contains("2-ladder: fail"));
    let out = bin()
        .args(["check", m3.to_str().unwrap(), "--ladder", "2", "--strict"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parse_errors_exit_2() {
    let out = bin().args(["check", "/nonexistent.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extend_and_precondition_errors() {
    let dir = workdir("extend");
    let m3 = write(&dir, "m3.json", M3);
    let outfile = dir.join("ext.json");
    let out = bin()
        .args([
            "extend",
            m3.to_str().unwrap(),
            "--subset",
            "top",
            "--ladder",
            "3",
            "-o",
            outfile.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&outfile).unwrap()).unwrap();
    assert_eq!(parsed["extended"]["elements"].as_array().unwrap().len(), 6);
    assert_eq!(parsed["new_elements"][0], "top'");
    // two atoms are not meet-closed: precondition violation
    let out = bin()
        .args([
            "extend",
            m3.to_str().unwrap(),
            "--subset",
            "a0,a1",
            "--ladder",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn rho_build_check_roundtrip_and_determinism() {
    let dir = workdir("rho");
    let t1 = dir.join("t1.json");
    let t2 = dir.join("t2.json");
    for t in [&t1, &t2] {
        let out = bin()
            .args([
                "rho", "build", "--levels", "3", "--window", "3", "--seed", "7", "-o",
                t.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    assert_eq!(
        std::fs::read(&t1).unwrap(),
        std::fs::read(&t2).unwrap(),
        "same seed, same bytes"
    );
    let out = bin()
        .args(["rho", "check", t1.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("rho-axioms: pass"));

    let boxfile = dir.join("box.json");
    let out = bin()
        .args([
            "rho",
            "export-box",
            t1.to_str().unwrap(),
            "--levels",
            "2",
            "--window",
            "2",
            "--mmax",
            "3",
            "-o",
            boxfile.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    // export then re-import reproduces the canonical bytes
    let reexport = dir.join("box2.json");
    let out = bin()
        .args([
            "export",
            boxfile.to_str().unwrap(),
            "--format",
            "json",
            "-o",
            reexport.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(&boxfile).unwrap(),
        std::fs::read(&reexport).unwrap()
    );

    let out = bin()
        .args(["rho", "witness", t1.to_str().unwrap(), "--f", "5,6,7"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn club_build_writes_state_and_dot() {
    let dir = workdir("club");
    let state = dir.join("club.json");
    let dot = dir.join("club.dot");
    let out = bin()
        .args([
            "club",
            "build",
            "--width-schedule",
            "2,2",
            "--seed",
            "5",
            "-o",
            state.to_str().unwrap(),
            "--dot",
            dot.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("stage-properties: pass"));
    assert!(stdout(&out).contains("breadth-2: pass"));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&state).unwrap()).unwrap();
    assert_eq!(parsed["state"]["widths"], serde_json::json!([2, 2]));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

#[test]
fn diamond_build_check_branch() {
    let dir = workdir("diamond");
    let state = dir.join("d.json");
    let out = bin()
        .args([
            "diamond", "build", "--stages", "1", "--width", "6", "-o",
            state.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    let out = bin()
        .args(["diamond", "check", state.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("properties: pass"));
    let branch = dir.join("branch.json");
    let out = bin()
        .args([
            "diamond",
            "branch",
            state.to_str().unwrap(),
            "--leaf",
            "t1_0",
            "-o",
            branch.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&branch).unwrap()).unwrap();
    assert!(doc["elements"].as_array().unwrap().len() > 1);
}

const CHAIN_FAMILY: &str = r#"{
  "base": {
    "elements": ["c0", "c1", "c2", "c3"],
    "relation_kind": "covers",
    "pairs": [["c0","c1"],["c1","c2"],["c2","c3"]]
  },
  "branching": [2],
  "thresholds": [4, 2],
  "ideals": {
    "": ["c0", "c1", "c2", "c3"],
    "0": ["c0", "c1"],
    "1": ["c0", "c1", "c2", "c3"]
  }
}"#;

#[test]
fn cohen_subcommands() {
    let dir = workdir("cohen");
    let fam = write(&dir, "family.json", CHAIN_FAMILY);
    let out = bin()
        .args(["cohen", "validate", fam.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("family: pass"));

    let out = bin()
        .args(["cohen", "density", fam.to_str().unwrap(), "--x", "c2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    let density: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(density["y"], "c2", "empty condition: y is x itself");

    let cond = write(
        &dir,
        "cond.json",
        &serde_json::to_string(&density["condition"]).unwrap(),
    );
    let out = bin()
        .args([
            "cohen",
            "cp",
            fam.to_str().unwrap(),
            cond.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    let members: Vec<String> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(members, vec!["c1", "c2"], "y plus its lex-earlier projection");

    let conds = write(
        &dir,
        "conds.json",
        &format!(
            r#"{{"conditions": [{}]}}"#,
            serde_json::to_string(&density["condition"]).unwrap()
        ),
    );
    let out = bin()
        .args([
            "cohen",
            "filter",
            fam.to_str().unwrap(),
            conds.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("filter-union: pass"));
}

#[test]
fn export_dot_has_cover_edges() {
    let dir = workdir("dot");
    let m3 = write(&dir, "m3.json", M3);
    let out = bin()
        .args(["export", m3.to_str().unwrap(), "--format", "dot"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).matches(" -> ").count(), 6);
}

#[test]
fn selftest_single_criterion() {
    let out = bin().args(["selftest", "--only", "2"]).output().unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("breadth-equivalence"));
    assert!(stdout(&out).contains("pass"));
}
