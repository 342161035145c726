use std::process::{Command, Output};

fn crset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crset"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn canonical_output_is_byte_identical_across_thread_counts() {
    let base = [
        "hitting",
        "--sets",
        "dyadic:6",
        "--n",
        "20000",
        "--seed",
        "11",
        "--canonical",
    ];
    let one = crset(&[&base[..], &["--threads", "1"]].concat());
    let four = crset(&[&base[..], &["--threads", "4"]].concat());
    let again = crset(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(four.stdout, again.stdout);
}

#[test]
fn canonical_laws_report_is_reproducible() {
    let args = [
        "laws",
        "incr",
        "--sets",
        "grid:0,1,2",
        "--n",
        "5000",
        "--seed",
        "3",
        "--canonical",
    ];
    let a = crset(&args);
    let b = crset(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 3);
    assert!(v.get("wall_clock_seconds").is_none());
}

#[test]
fn exit_codes() {
    assert_eq!(
        crset(&["renyi", "--n", "20000", "--depth", "1"])
            .status
            .code(),
        Some(0)
    );
    // fixed-K binomial fails the Poisson increments check
    let bin = crset(&[
        "laws",
        "incr",
        "--model",
        "binomial01",
        "--sets",
        "grid:0,1,2",
        "--n",
        "100000",
    ]);
    assert_eq!(bin.status.code(), Some(1));
    let bad = crset(&["hitting", "--model", "{\"parts\": [", "--sets", "dyadic:2"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("model"));
    assert_eq!(crset(&["hitting", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(
        crset(&["hitting", "--sets", "[[[0.5, 0.1]]]"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn csv_output_has_header() {
    let out = crset(&[
        "hitting", "--sets", "dyadic:2", "--n", "1000", "--out", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("set,p_hat,ci,analytic,tail_bound,verdict")
    );
    assert_eq!(lines.count(), 2);
}
