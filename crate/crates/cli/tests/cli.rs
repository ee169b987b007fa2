use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn altsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_altsum"))
        .args(args)
        .env_remove("ALTSUM_THREADS")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.display().to_string()
}

fn json_ok(args: &[&str]) -> Value {
    let out = altsum(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn num(v: &Value) -> f64 {
    v.to_string().parse().unwrap()
}

#[test]
fn coeffs_csv_rows() {
    let out = altsum(&["coeffs", "--m", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["j,gamma,tau", "1,4/3,4/3", "2,-1/6,-1/6"]);
}

#[test]
fn sum_example_is_exact() {
    let v = json_ok(&[
        "sum", "--m", "2", "--n", "3", "--f", "x1^2", "--F", "x1^3/3",
    ]);
    let r = &v["result"];
    assert_eq!(num(&r["approximation"]), 5.0);
    assert_eq!(num(&r["exact_sum"]), 5.0);
    assert_eq!(num(&r["residual"]), 0.0);
    assert_eq!(r["residual_exact"], "0/1");
    for key in ["config", "result", "diagnostics"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["config"]["form"], "tau-grouped-right");
}

#[test]
fn sum_quadrature_and_verbose_plan() {
    let v = json_ok(&[
        "sum",
        "--m",
        "2",
        "--n",
        "5,4",
        "--f",
        "x1^2*x2 + x2^3",
        "--force-quad",
        "--verbose",
    ]);
    assert_eq!(v["diagnostics"]["method"], "quadrature");
    assert_eq!(v["diagnostics"]["plan"].as_array().unwrap().len(), 9);
    let r = &v["result"];
    assert!((num(&r["approximation"]) - num(&r["exact_sum"])).abs() < 1e-8);
}

#[test]
fn sum_compare_em() {
    let v = json_ok(&[
        "sum",
        "--m",
        "2",
        "--n",
        "3",
        "--f",
        "x1^3",
        "--F",
        "x1^4/4",
        "--compare-em",
    ]);
    assert_eq!(num(&v["result"]["em_approximation"]), 9.0);
    let v = json_ok(&[
        "sum",
        "--m",
        "2",
        "--n",
        "20",
        "--f",
        "exp(-x1)",
        "--F",
        "-exp(-x1)",
        "--compare-em",
        "--deriv",
        "1:-exp(-x1)",
        "--deriv",
        "2:exp(-x1)",
    ]);
    assert!(num(&v["result"]["em_residual"]).abs() < 1e-2);
    let out = altsum(&["sum", "--m", "2", "--n", "3,3", "--f", "x1", "--compare-em"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn series_example_and_scan() {
    let v = json_ok(&[
        "series", "--m", "2", "--m0", "2", "--f", "x1", "--F", "x1^2/2", "--shift", "0",
    ]);
    let row = &v["result"]["rows"][0];
    assert_eq!(row["value_exact"], "-1/12");
    assert!((num(&row["value"]) + 1.0 / 12.0).abs() < 1e-15);

    let v = json_ok(&[
        "series",
        "--m",
        "2",
        "--m0",
        "2",
        "--f",
        "x1*x2",
        "--F",
        "x1^2*x2^2/4",
        "--p",
        "2",
        "--scan-shifts",
        "0:3",
    ]);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["value_exact"] == "1/144"));
}

#[test]
fn series_with_bound() {
    let v = json_ok(&[
        "series",
        "--m",
        "2",
        "--m0",
        "2",
        "--f",
        "exp(-x1*log(2))",
        "--F",
        "-exp(-x1*log(2))/log(2)",
        "--shift",
        "6",
        "--M2m",
        "0.02",
    ]);
    let row = &v["result"]["rows"][0];
    let bound = num(&row["remainder_bound"]);
    assert!(bound > 0.0);
    assert!((num(&row["value"]) - 2.0).abs() <= bound);
}

#[test]
fn bound_values() {
    let v = json_ok(&["bound", "--m", "1", "--p", "1", "--M2m", "1", "--tight"]);
    assert!((num(&v["result"]["coarse_bound"]) - 0.04166785848).abs() < 1e-10);
    assert!((num(&v["result"]["tight_bound"]) - 1.0 / 24.0).abs() < 1e-15);
    let out = altsum(&[
        "bound",
        "--m",
        "1",
        "--p",
        "1",
        "--M2m",
        "1",
        "--strict-factor",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decompose_children_are_unimodular() {
    let v = json_ok(&["decompose", "--matrix", "1,1;0,2", "--strict", "1,0"]);
    assert_eq!(v["result"]["det"], "2");
    let cones = v["result"]["cones"].as_array().unwrap();
    assert!(!cones.is_empty());
    for c in cones {
        assert!(c["det"] == "1" || c["det"] == "-1");
    }
    let out = altsum(&["decompose", "--matrix", "1,2;2,4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn polytope_counts() {
    let v = json_ok(&["polytope", "--file", &data("triangle.json"), "--count"]);
    assert_eq!(v["result"]["count"], 15);
    let v = json_ok(&["polytope", "--file", &data("quadrilateral.json"), "--count"]);
    assert_eq!(v["result"]["count"], 7);
    let out = altsum(&["polytope", "--file", &data("nonconvex.json"), "--count"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn polytope_sum_close_to_exact() {
    let v = json_ok(&[
        "polytope",
        "--file",
        &data("square.json"),
        "--f",
        "exp(-(x1-2)^2-(x2-2)^2)",
        "--support",
        "-8,12;-8,12",
        "--m",
        "3",
    ]);
    assert!(num(&v["result"]["residual"]).abs() < 1e-2);
}

#[test]
fn bench_reports() {
    let out = altsum(&["bench", "--families", "", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "function,m,n,alt_error,em_error,alt_time,em_time"
    );

    let v = json_ok(&[
        "bench",
        "--families",
        "exp-neg",
        "--m",
        "1:4",
        "--n",
        "100",
        "--reps",
        "1",
    ]);
    let errs: Vec<f64> = v["result"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| num(&r["alt_error"]))
        .collect();
    assert_eq!(errs.len(), 4);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn exit_codes() {
    assert_eq!(
        altsum(&["sum", "--m", "2", "--n", "3", "--f", "x1^^2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        altsum(&["sum", "--m", "2", "--n", "3", "--f", "x2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(altsum(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(altsum(&["--help"]).status.code(), Some(0));
    let out = altsum(&[
        "series", "--m", "2", "--m0", "2", "--f", "1/x1", "--F", "log(x1)", "--shift", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = altsum(&["polytope", "--file", "/nonexistent.json", "--count"]);
    assert_eq!(out.status.code(), Some(2));
}
