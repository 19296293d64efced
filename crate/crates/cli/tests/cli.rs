use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    root.to_string_lossy().into_owned()
}

fn tsuic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsuic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = tsuic(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn classify_names_worked_examples() {
    let o = tsuic(&["classify", &data("double_xor.txt")]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("case II-D (H_33), fully participated\n"));
    let o = tsuic(&["classify", &data("acyclic_chain.txt")]);
    assert!(stdout(&o).starts_with("case I (H_7)"));
    let o = tsuic(&["classify", &data("disjoint.txt")]);
    assert!(stdout(&o).contains("P3 empty"));
}

#[test]
fn beta_methods_match_worked_examples() {
    let r = json(&["beta", &data("double_xor.txt"), "--method", "oracle"]);
    assert_eq!(r["rate"]["lower"], "2");
    assert_eq!(r["rate"]["exact"], true);
    let r = json(&["beta", &data("two_way_common.txt"), "--method", "dispatch"]);
    assert_eq!((r["rate"]["lower"].as_str(), r["rate"]["exact"].as_bool()), (Some("2"), Some(true)));
    let r = json(&["beta", &data("two_way_private.txt"), "--method", "coloring"]);
    assert_eq!(r["rate"]["upper"], "3");
    assert_eq!(r["rate"]["bits"], serde_json::json!([1, 2]));
}

#[test]
fn beta_accepts_block_length_override() {
    let r = json(&["beta", &data("double_xor.txt"), "--t", "2", "--method", "coloring"]);
    assert_eq!(r["rate"]["t"], 2);
    assert_eq!(r["rate"]["upper"], "2");
}

#[test]
fn multi_sender_files_are_recognized() {
    let r = json(&["beta", &data("three_senders.txt")]);
    assert_eq!(r["rate"]["upper"], "4");
    assert_eq!(r["pools"]["common"], serde_json::json!([4, 5]));
    let o = tsuic(&["beta", &data("three_senders.txt"), "--method", "oracle"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn criticality_flags_arcs() {
    let r = json(&["beta", &data("double_xor.txt"), "--criticality"]);
    let arcs = r["criticality"]["arcs"].as_array().unwrap();
    let a31 = arcs.iter().find(|a| a["arc"] == serde_json::json!([3, 1])).unwrap();
    assert_eq!(a31["critical"], true);
    let r = json(&["beta", &data("two_way_private.txt"), "--criticality"]);
    assert!(r["criticality"]["arcs"].as_array().unwrap().iter().all(|a| a["critical"] == false));
}

#[test]
fn code_constructions_verify() {
    let r = json(&["code", &data("two_way_common.txt"), "--construct"]);
    assert_eq!(r["code"]["description"], "S1: {x1⊕x3}; S2: {x2⊕x4}");
    assert_eq!(r["code"]["valid"], true);
    let r = json(&["code", &data("one_sided_common.txt"), "--construct"]);
    assert_eq!(r["code"]["description"], "S1: {x1⊕x4⊕x5, x2}; S2: {x3}");
    let r = json(&["code", &data("two_way_private.txt")]);
    assert_eq!((r["code"]["rate"].as_str(), r["code"]["valid"].as_bool()), (Some("3"), Some(true)));
}

#[test]
fn emitted_code_verifies_from_file() {
    let o = tsuic(&["code", &data("double_xor.txt")]);
    let text = stdout(&o);
    let dir = std::env::temp_dir().join(format!("tsuic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("code.json");
    std::fs::write(&path, text.lines().last().unwrap()).unwrap();
    let ok = tsuic(&["verify", &data("double_xor.txt"), path.to_str().unwrap()]);
    assert!(ok.status.success());
    assert!(stdout(&ok).starts_with("valid"));
    let bad = tsuic(&["verify", &data("two_way_private.txt"), path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn confusion_dot_has_blocks() {
    let o = tsuic(&["confusion", &data("double_xor.txt"), "--dot"]);
    let dot = stdout(&o);
    assert_eq!(dot.matches(" [label=\"(").count(), 8);
    assert_eq!(dot.matches("subgraph cluster_").count(), 2);
    let r = json(&["confusion", &data("two_way_private.txt")]);
    assert_eq!((r["vertices"].as_u64(), r["blocks"].as_u64()), (Some(16), Some(4)));
}

#[test]
fn sweeps_report_json_lines() {
    let o = tsuic(&["sweep", "--family", "empty", "--check", "dispatch-vs-oracle"]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let o = tsuic(&["sweep", "--family", "iib", "--check", "two-way-common-max"]);
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 108);
    assert!(lines.iter().all(|l| l["status"] == "pass"));
}

#[test]
fn failing_checks_set_the_exit_code() {
    // Fully participated II-B is a precondition of the max-formula check.
    let o = tsuic(&["sweep", "--family", "corners", "--check", "two-way-common-max"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().all(|l| l.contains("\"status\":\"error\"")));
}

#[test]
fn reports_are_byte_stable() {
    let args = ["--json", "beta", &data("one_sided_common.txt"), "--criticality"];
    assert_eq!(tsuic(&args).stdout, tsuic(&args).stdout);
    let args = ["sweep", "--family", "fp36", "--check", "dispatch-vs-oracle"];
    let a = tsuic(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, tsuic(&args).stdout);
}

#[test]
fn bad_input_is_an_error() {
    let o = tsuic(&["classify", "missing-file.txt"]);
    assert_eq!(o.status.code(), Some(2));
    let o = tsuic(&["beta", &data("acyclic_chain.txt"), "--t", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("t*N = 20"));
    let o = tsuic(&["sweep", "--family", "nope", "--check", "two-way-common-max"]);
    assert!(!o.status.success());
}
