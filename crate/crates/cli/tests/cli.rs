use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilcover"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (v, out.status.code().unwrap())
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn baer_both_methods_agree() {
    let (v, code) = json(&["baer", "--r", "2", "--s", "2", "--c", "2", "--method", "both"]);
    assert_eq!(code, 0);
    assert_eq!(v["subcommand"], "baer");
    assert_eq!(v["result"]["invariants"], serde_json::json!([2, 2]));
    assert_eq!(v["result"]["agree"], true);
    assert_eq!(v["input"]["r"], 2);
    assert!(v["version"].is_string() && v["elapsed_ms"].is_u64());

    let (v, _) = json(&["baer", "--r", "4", "--s", "6", "--c", "3", "--method", "engine"]);
    assert_eq!(v["result"]["invariants"], serde_json::json!([2, 2, 2]));
    assert!(v["result"].get("agree").is_none());
}

#[test]
fn hall_counts() {
    let (v, code) = json(&["hall", "--letters", "2", "--weight", "3", "--count-only"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["counts"], serde_json::json!([2, 1, 2]));
    assert!(v["result"].get("basis").is_none());
    let (v, _) = json(&["hall", "--letters", "2", "--weight", "3"]);
    let brackets: Vec<&str> = v["result"]["basis"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["bracket"].as_str().unwrap())
        .collect();
    assert_eq!(brackets, ["x1", "x2", "[x2,x1]", "[[x2,x1],x1]", "[[x2,x1],x2]"]);
    let (_, code) = json(&["--max-basis", "10", "hall", "--letters", "3", "--weight", "4"]);
    assert_eq!(code, 3);
}

#[test]
fn normal_form_of_a_word() {
    let (v, code) = json(&["nf", "--letters", "2", "--class", "3", "--expr", "x2 x1"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["normal_form"], "x1 x2 [x2,x1]");
    assert_eq!(v["result"]["exponents"], serde_json::json!([1, 1, 1, 0, 0]));
    let (_, code) = json(&["nf", "--letters", "2", "--class", "3", "--expr", "x3"]);
    assert_eq!(code, 1);
}

#[test]
fn cover_subcommands() {
    let (v, code) = json(&["cover", "verdict", "--r", "4", "--s", "6", "--c", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verdict"], "NoneExists");
    assert_eq!(v["result"]["evidence"]["kind"], "trace");
    assert!(v["result"]["evidence"]["steps"].as_array().unwrap().len() >= 7);

    let (v, code) = json(&["cover", "construct", "--r", "2", "--s", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["order"], 8);
    assert_eq!(v["result"]["center_order"], 2);
    assert_eq!(v["result"]["is_stem_cover"], true);

    let (v, code) = json(&["cover", "search", "--r", "2", "--s", "2", "--c", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["passing"], 0);
    assert_eq!(v["result"]["theorem_consistent"], true);

    let (_, code) = json(&["--max-order", "16", "cover", "search", "--r", "2", "--s", "2", "--c", "3"]);
    assert_eq!(code, 3);
    let (_, code) = json(&["--max-order", "100", "cover", "construct", "--r", "12", "--s", "12"]);
    assert_eq!(code, 3);
    let (_, code) = json(&["cover", "search", "--r", "4", "--s", "4", "--c", "2"]);
    assert_eq!(code, 1);
}

#[test]
fn pcp_check_and_materialize() {
    let q8 = scratch("q8.pcp", "# quaternion group\np = 2\nm = 3\ng1^2 = g3\ng2^2 = g3\n[g2,g1] = g3\n");
    let (v, code) = json(&["pcp", "--file", q8.to_str().unwrap(), "--check"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["consistent"], true);
    assert_eq!(v["result"]["order"], 8);

    let (v, code) = json(&["pcp", "--file", q8.to_str().unwrap(), "--materialize", "--table"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["involutions"], 1);
    assert_eq!(v["result"]["summary"]["center_order"], 2);
    assert_eq!(v["result"]["table"].as_array().unwrap().len(), 8);

    let bad = scratch("bad.pcp", "p = 2\nm = 3\ng1^2 = g2\n[g2,g1] = g3\n");
    let (v, code) = json(&["pcp", "--file", bad.to_str().unwrap(), "--check"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["consistent"], false);
    let (_, code) = json(&["pcp", "--file", bad.to_str().unwrap(), "--materialize"]);
    assert_eq!(code, 1);

    let garbled = scratch("garbled.pcp", "p = 2\nm = 2\ng1 = g2\n");
    let out = run(&["pcp", "--file", garbled.to_str().unwrap(), "--check"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["baer", "--r", "2"]).status.code(), Some(1));
    assert_eq!(run(&["baer", "--r", "0", "--s", "2", "--c", "1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn identical_invocations_give_identical_json() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("elapsed_ms");
        if let Some(r) = v["result"].as_object_mut() {
            r.remove("elapsed_ms");
        }
        serde_json::to_string(&v).unwrap()
    };
    for args in [
        &["cover", "search", "--r", "2", "--s", "2", "--c", "1"][..],
        &["selftest", "--seed", "9", "--trials", "20"],
        &["cover", "verdict", "--r", "6", "--s", "9", "--c", "3"],
    ] {
        let (a, _) = json(args);
        let (b, _) = json(args);
        assert_eq!(strip(a), strip(b), "{args:?}");
    }
}

#[test]
fn text_output_is_a_view_of_the_payload() {
    let out = run(&["baer", "--r", "4", "--s", "6", "--c", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("agree: true"));
    assert!(text.contains("group: Z_2"));
}
