//! End-to-end tests of the binary: exit-code contract, wire formats, and
//! byte determinism.

use std::process::{Command, Output};

fn polybend(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polybend"))
        .args(args)
        .env_remove("POLYBEND_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn classify_regular_and_collapsed_square() {
    let out = polybend(&["classify", "--r", "1,1,1,1", "--caterpillar", "--c", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["p"], 0);
    assert_eq!(v["q"], 0);
    assert_eq!(v["k"], 1);
    assert_eq!(v["type"], "II");
    assert_eq!(v["lagrangian"], false);

    let out = polybend(&["classify", "--r", "1,1,1,1", "--caterpillar", "--c", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["p"], 1);
    assert_eq!(v["q"], 1);
    assert_eq!(v["type"], "I");
    assert_eq!(v["lagrangian"], true);
}

#[test]
fn classify_infeasible_names_the_face() {
    let out = polybend(&["classify", "--r", "1,1,1,1", "--caterpillar", "--c", "3.2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("face (0, 1, 2)"),
        "diagnostic names the face: {err}"
    );
}

#[test]
fn usage_errors_exit_64() {
    // n = 3 has no diagonals.
    let out = polybend(&["classify", "--r", "1,1,1", "--caterpillar", "--c", "1"]);
    assert_eq!(out.status.code(), Some(64));
    // Malformed flag value.
    let out = polybend(&["classify", "--r", "abc", "--caterpillar", "--c", "1"]);
    assert_eq!(out.status.code(), Some(64));
    // Unknown subcommand.
    let out = polybend(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    // Crossing diagonals.
    let out = polybend(&[
        "classify",
        "--r",
        "1,1,1,1,1,1",
        "--diagonals",
        "0-2,1-3,0-4",
        "--c",
        "1,1,1",
    ]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn flow_half_turn_swaps_square_edges() {
    let dir = std::env::temp_dir().join("polybend-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("square.json");
    std::fs::write(
        &path,
        r#"{"r":[1,1,1,1],"u":[[1,0,0],[0,1,0],[-1,0,0],[0,-1,0]]}"#,
    )
    .unwrap();
    let out = polybend(&[
        "flow",
        "--in",
        path.to_str().unwrap(),
        "--k",
        "0",
        "--t",
        "3.141592653589793",
        "--normalized",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let u0 = v["u"][0].as_array().unwrap();
    assert!(
        (u0[1].as_f64().unwrap() - 1.0).abs() < 1e-12,
        "edge 0 becomes e2"
    );
}

#[test]
fn sample_is_deterministic_and_on_fiber() {
    let args = [
        "sample",
        "--r",
        "1,1,1,1,1",
        "--caterpillar",
        "--c",
        "0.72,0.98",
        "--count",
        "5",
        "--seed",
        "3",
    ];
    let a = polybend(&args);
    let b = polybend(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "byte-identical under fixed seed");
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let samples = v.as_array().unwrap();
    assert_eq!(samples.len(), 5);
    for s in samples {
        // Re-measure c_0 = ½|r0·u0 + r1·u1|².
        let u = s["u"].as_array().unwrap();
        let r = s["r"].as_array().unwrap();
        let mut d = [0.0; 3];
        for i in 0..2 {
            let ri = r[i].as_f64().unwrap();
            for (x, di) in u[i].as_array().unwrap().iter().zip(d.iter_mut()) {
                *di += ri * x.as_f64().unwrap();
            }
        }
        let c0 = 0.5 * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        assert!((c0 - 0.72).abs() < 1e-10, "re-measured momentum {c0}");
    }
}

#[test]
fn gc_dot_styles_the_diamond() {
    let out = polybend(&["gc", "--r", ".5,.5,.5,.5", "--c", "0", "--dot"]);
    assert_eq!(out.status.code(), Some(0));
    let dot = stdout(&out);
    assert!(dot.starts_with("graph"));
    assert!(dot.contains("color=red"), "diamond cycle styled: {dot}");

    let out = polybend(&["gc", "--r", ".5,.5,.5,.5", "--c", "0.245"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["diamonds"], serde_json::json!([false]));
}

#[test]
fn gc_pattern_of_a_frame_file() {
    let dir = std::env::temp_dir().join("polybend-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("frame.json");
    std::fs::write(
        &path,
        r#"{"n":4,"z":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]],"w":[[0.5,0],[-0.5,0],[0.5,0],[-0.5,0]]}"#,
    )
    .unwrap();
    let out = polybend(&["gc", "--frame", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["perimeter"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let mu = v["pattern"]["mu"].as_array().unwrap();
    assert!((mu[3][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn verify_reports_are_deterministic_and_honor_thread_cap() {
    let args = [
        "verify",
        "poisson",
        "--n",
        "5",
        "--samples",
        "40",
        "--seed",
        "11",
    ];
    let a = polybend(&args);
    assert_eq!(a.status.code(), Some(0));
    let b = Command::new(env!("CARGO_BIN_EXE_polybend"))
        .args(args)
        .env("POLYBEND_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "stdout independent of parallelism");
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["config"]["seed"], 11);
    assert!(v["version"].is_string());

    let bad = Command::new(env!("CARGO_BIN_EXE_polybend"))
        .args(["verify", "poisson"])
        .env("POLYBEND_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn verify_failure_exits_one_with_counterexample() {
    // An absurdly tight bracket tolerance forces a reported failure.
    let out = polybend(&[
        "verify",
        "poisson",
        "--n",
        "5",
        "--samples",
        "20",
        "--seed",
        "1",
        "--tol-symplectic",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("counterexample"),
        "stderr names a reproducer: {err}"
    );
    assert!(err.contains("sample="), "reproducer carries indices: {err}");
}
