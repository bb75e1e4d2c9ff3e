use std::path::PathBuf;
use std::process::{Command, Output};

use gapfactor::tables::{CatenaryRow, LengthRow, Table};
use serde_json::Value;

fn gapfactor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapfactor"))
        .args(args)
        .output()
        .expect("run gapfactor")
}

fn stdout(args: &[&str]) -> String {
    let out = gapfactor(args);
    assert!(
        out.status.success(),
        "{args:?} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn lengths_match_golden_and_agree() {
    let csv = stdout(&[
        "lengths", "--from", "1", "--to", "12", "--grid-q", "2", "--format", "csv",
    ]);
    assert_eq!(csv, golden("lengths_one_gap_q2.csv"));
    let t = Table::<LengthRow>::from_csv(&csv).unwrap();
    assert_eq!(t.rows.len(), 23);
    assert!(t.rows.iter().all(|r| r.agree == Some(true)));
    let json = stdout(&["lengths", "--from", "1", "--to", "12", "--grid-q", "2"]);
    assert_eq!(Table::<LengthRow>::from_json(&json).unwrap(), t);
}

#[test]
fn section_four_golden() {
    let csv = stdout(&[
        "lengths",
        "--monoid",
        "Q: 0 u [2,3] u [4,inf)",
        "--from",
        "2",
        "--to",
        "14",
        "--grid-q",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(csv, golden("lengths_section_four.csv"));
}

#[test]
fn catenary_golden() {
    let csv = stdout(&[
        "catenary", "--from", "1", "--to", "12", "--grid-q", "2", "--format", "csv",
    ]);
    assert_eq!(csv, golden("catenary_one_gap_q2.csv"));
    let t = Table::<CatenaryRow>::from_csv(&csv).unwrap();
    let ten = t.rows.iter().find(|r| r.v == "10".parse().unwrap()).unwrap();
    assert_eq!(ten.c_d, 3);
    assert!(t
        .rows
        .iter()
        .all(|r| r.d_max_step <= r.c_d.max(2) && r.intr_max_step <= r.c_intr.max(2)));
}

#[test]
fn sequential_rows_are_identical() {
    let a = stdout(&["catenary", "--from", "3", "--to", "8", "--format", "csv"]);
    let b = stdout(&[
        "catenary",
        "--from",
        "3",
        "--to",
        "8",
        "--format",
        "csv",
        "--sequential",
    ]);
    assert_eq!(a, b);
}

#[test]
fn factor_t6() {
    let out = stdout(&["factor", "t^6", "all"]);
    assert_eq!(out, golden("factor_t6.json"));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["d"]["lengths"], "{4,5,6}");
    assert_eq!(v["intr"]["lengths"], "{2,3,4,5,6}");
    let one: Value = serde_json::from_str(&stdout(&["factor", "t^6", "2"])).unwrap();
    assert_eq!(one["d"]["factorizations"].as_array().unwrap().len(), 0);
    assert_eq!(one["intr"]["factorizations"][0]["length"], 2);
}

#[test]
fn factor_in_dvr_context() {
    let dir = std::env::temp_dir().join(format!("gapfactor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let ctx = dir.join("ctx.json");
    std::fs::write(&ctx, r#"{"field":"Q","points":["0","1","u"],"N":3}"#).unwrap();
    let out = stdout(&["factor", "u^2*(x+2)", "--context", ctx.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["factorization"]["exponents"], serde_json::json!([2, 2, 2]));
    assert_eq!(
        gapfactor(&["factor", "x - 1", "--context", ctx.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn gadgets_and_analyze() {
    let v: Value = serde_json::from_str(&stdout(&[
        "gadget",
        "zigzag",
        "--alpha",
        "1",
        "--alpha-prime",
        "3/2",
        "--eps",
        "1/4",
    ]))
    .unwrap();
    assert_eq!(v["gadget"]["alpha"]["value"], "1");
    assert!(v["gadget"]["membership"]["CertifiedInIntR"].is_object());
    let v: Value = serde_json::from_str(&stdout(&["gadget", "psi", "--s", "0", "--points", "0,1,u"])).unwrap();
    assert_eq!(v["gadget"]["descriptor"]["kind"], "psi_s");
    let v: Value = serde_json::from_str(&stdout(&["analyze"])).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn verify_exit_codes() {
    let out = gapfactor(&["verify", "normalization into D", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("[PASS] 9."));
    let a = stdout(&["verify", "6", "--seed", "5"]);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(gapfactor(&["verify", "nope"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["lengths", "--monoid", "Q: 0 u [1"][..],
        &["lengths", "--grid-q", "0"],
        &["lengths", "--from", "5", "--to", "4"],
        &["factor", "t^6", "seven"],
        &["factor", "t^(1/2)"],
        &["frobnicate"],
    ] {
        assert_eq!(gapfactor(args).status.code(), Some(2), "{args:?}");
    }
}
