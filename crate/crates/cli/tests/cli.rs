use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn farey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_farey")).args(args).output().expect("binary runs")
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against the stored file; `FAREY_BLESS=1` rewrites it.
fn assert_golden(name: &str, actual: &[u8]) {
    let path = golden(name);
    if std::env::var_os("FAREY_BLESS").is_some() {
        fs::write(&path, actual).unwrap();
    }
    let want = fs::read(&path).unwrap();
    assert_eq!(String::from_utf8_lossy(actual), String::from_utf8_lossy(&want), "{name}");
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn expand_11_40() {
    let out = farey(&["expand", "--n", "5", "11/40"]);
    assert_eq!(out.status.code(), Some(0));
    assert_golden("expand_n5_11_40.json", &out.stdout);
    let v = json(&out);
    let table = v["convergents"].as_array().unwrap();
    assert_eq!(table.first().unwrap()["value"], "1/5");
    assert_eq!(table.last().unwrap()["value"], "11/40");
    for w in table.windows(2) {
        assert!(w[0]["q"].as_i64() < w[1]["q"].as_i64());
    }
}

#[test]
fn enumerate_11_40() {
    let out = farey(&["enumerate", "--n", "5", "11/40"]);
    assert_eq!(out.status.code(), Some(0));
    assert_golden("enumerate_n5_11_40.json", &out.stdout);
    let v = json(&out);
    assert_eq!(v["count"], 8);
    let got: BTreeSet<&str> = v["text"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    let want: BTreeSet<&str> = [
        "1/0+ 5/1+ 1/2+ 1/1+ 1/1+ 1/1",
        "1/0+ 5/1+ 1/2+ 1/2+ -1/2",
        "1/0+ 5/1+ 1/2+ 1/1+ 1/2",
        "1/0+ 5/1+ 1/3+ -1/2+ 1/1",
        "1/0+ 5/1+ 1/3+ -1/3",
        "1/0+ 5/2+ -1/2+ -1/2+ 1/2",
        "1/0+ 5/2+ -1/2+ -1/3+ -1/2",
        "1/0+ 5/2+ -1/2+ -1/2+ 1/1+ 1/1",
    ]
    .into();
    assert_eq!(got, want);
}

#[test]
fn composite_modulus_exits_2_with_witness() {
    let out = farey(&["expand", "--n", "6", "1/6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert_golden("expand_n6_1_6.stderr", &out.stderr);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("A=3, B=4"), "{msg}");
}

#[test]
fn domain_errors_exit_2() {
    for args in [
        &["expand", "--n", "5", "1/2"][..],
        &["expand", "--n", "5", "1/x"],
        &["enumerate", "--n", "12", "1/12"],
        &["convergents", "--n", "5", "1/0+ 5/1+ 1/1"],
        &["path", "--n", "3", "inf -> 1/3 -> 1/2"],
        &["check", "tree", "--n", "9"],
    ] {
        assert_eq!(farey(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn text_format() {
    let out = farey(&["enumerate", "--n", "5", "7/20", "--format", "text"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1/0+ 5/2+ -1/4\n");
    let out = farey(&["convergents", "--n", "25", "1/0+ 25/1+ -1/2+ 1/1", "--format", "text"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1/0+ 25/1+ -1/2+ 1/1\n0\t1/25\n1\t1/50\n2\t2/75\n");
}

#[test]
fn path_repair() {
    let v = json(&farey(&["path", "--n", "3", "inf -> 1/3 -> 1/6 -> 2/9 -> 5/21"]));
    assert_eq!(v["well_directed"], false);
    assert_eq!(v["repaired"], serde_json::json!(["inf", "1/3", "2/9", "5/21"]));
    let v = json(&farey(&["path", "--n", "3", "inf -> 1/3 -> 2/9 -> 5/21"]));
    assert_eq!(v["well_directed"], true);
    assert_eq!(v["cf"], "1/0+ 3/1+ -1/3+ 1/2");
}

#[test]
fn surd_and_decimal_inputs() {
    let v = json(&farey(&["expand", "--n", "5", "sqrt(2)", "--max-terms", "4"]));
    assert_eq!(v["input"], "surd");
    assert_eq!(v["cf"], "1/0+ 5/7+ 1/14+ 1/14+ 1/14+ 1/14");
    let v = json(&farey(&["expand", "--n", "5", "--real", "0.275"]));
    assert_eq!(v["input"], "decimal");
    assert_eq!(v["exact_value"], "11/40");
    assert_eq!(v["exact"], true);
}

#[test]
fn check_suites_report_json() {
    let out = farey(&["check", "no-crossing", "--n", "3", "--qmax", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["reports"][0]["checked"].as_u64().unwrap() > 0);
}

#[test]
fn plot_is_deterministic_and_marks_paths() {
    let args = ["plot", "--n", "3", "--lo", "0", "--hi", "1", "--qmax", "30", "--highlight", "inf -> 1/3 -> 2/9 -> 5/21"];
    let a = farey(&args);
    let b = farey(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let svg = String::from_utf8(a.stdout).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches(r#"class="path0""#).count(), 3);

    let out = farey(&["plot", "--n", "3", "--lo", "0", "--hi", "1", "--qmax", "9", "--edges"]);
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(lines.iter().any(|e| e["from"] == "2/9" && e["to"] == "1/3"));
    assert!(lines.iter().all(|e| e["n"] == 3));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("farey-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let file = dir.join("f1.svg");
    let out = farey(&["plot", "--n", "1", "--lo", "-1", "--hi", "1", "--qmax", "5", "--out", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let svg = fs::read_to_string(&file).unwrap();
    assert!(svg.contains("M 20.000"));
    fs::remove_dir_all(&dir).unwrap();
}
