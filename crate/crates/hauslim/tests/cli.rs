//! End-to-end checks of the command-line surface: subcommands, file
//! formats, and exit codes.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hauslim"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn sample_betti_diagonal_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let family = dir.path().join("family.json");
    write(
        &family,
        r#"{
            "formula": "x1^2 + x2^2 - (1 + l)^2 = 0",
            "box": [[-2.0, 2.0], [-2.0, 2.0]],
            "lambda_range": [0.0, 1.0]
        }"#,
    );

    let cloud = dir.path().join("fiber.csv");
    let out = bin()
        .args(["sample", family.to_str().unwrap(), "--lambda", "0.25", "--resolution", "81"])
        .args(["--out", cloud.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(&cloud).unwrap();
    assert!(text.starts_with("# dim=2\n"));
    assert!(text.lines().count() > 64);

    let curve = dir.path().join("curve.csv");
    let out = bin()
        .args(["betti", cloud.to_str().unwrap(), "--radius", "auto", "--k-max", "1"])
        .args(["--curve-out", curve.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["betti"], serde_json::json!([1, 1]));
    let curve_text = std::fs::read_to_string(&curve).unwrap();
    assert!(curve_text.starts_with("scale,b_0,b_1\n"));
    assert!(curve_text.lines().count() > 30);

    let tuples = dir.path().join("tuples.csv");
    let out = bin()
        .args(["diagonal", cloud.to_str().unwrap(), "--p", "1", "--delta", "0.05"])
        .args(["--out", tuples.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(&tuples).unwrap();
    assert!(text.starts_with("# base_dim=2 arity=2\n"));

    // distance of the fiber to itself is zero
    let out = bin()
        .args(["hausdorff", cloud.to_str().unwrap(), cloud.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0");
}

#[test]
fn verify_limit_builtin_exits_zero() {
    let out = bin()
        .args(["verify-limit", "circle", "--k-max", "0", "--resolution", "161"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["all_inequalities_hold"], serde_json::json!(true));
}

#[test]
fn retract_demo_on_complex_file() {
    let dir = tempfile::tempdir().unwrap();
    let complex = dir.path().join("complex.json");
    write(
        &complex,
        r#"{
            "vertices": [
                {"coords": [0.0, 0.0], "lambda": 0.0},
                {"coords": [1.0, 0.0], "lambda": 0.0},
                {"coords": [0.0, 1.0], "lambda": 1.0}
            ],
            "simplices": [[0, 1, 2]]
        }"#,
    );
    let out = bin()
        .args(["retract-demo", complex.to_str().unwrap()])
        .args(["--levels", "0.25,0.5", "--samples", "8", "--strict-complex"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["all_pass"], serde_json::json!(true));
}

#[test]
fn bounds_json_shape() {
    let out = bin()
        .args(["bounds", "khovanskii", "--ell", "2", "--alpha", "1", "--betas", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["formula"], "khovanskii");
    assert_eq!(v["value"], "36");
    assert_eq!(v["constant_assumed"], 1);
}

#[test]
fn error_exit_codes() {
    // validation failure
    let out = bin().args(["bounds", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // missing file
    let out = bin().args(["hausdorff", "/no/such/a.csv", "/no/such/b.csv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // a plateau demand no run of a doubling cloud can meet
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("sparse.csv");
    write(&cloud, "# dim=1\n0\n1\n3\n7\n15\n31\n");
    let out = bin()
        .args(["betti", cloud.to_str().unwrap(), "--radius", "auto", "--k-max", "0"])
        .args(["--plateau-fraction", "0.9"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}
