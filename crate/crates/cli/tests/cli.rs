//! End-to-end tests of the command-line interface: output shapes, exit
//! codes, and the determinism contracts.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainstretch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
    let path =
        std::env::temp_dir().join(format!("chainstretch-test-{name}-{}", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path
}

#[test]
fn stretch_single_triangle() {
    let file = write_temp("tri", "0,0\n1,0\n0,1\n");
    let out = run(&["stretch", "--input", file.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["stretch"], 1.0);
    assert_eq!(v["n"], 3);
    std::fs::remove_file(file).ok();
}

#[test]
fn stretch_kite_value() {
    let file = write_temp("kite", "# kite\n0,0\n10,0\n5,1\n5,-1\n");
    let out = run(&["stretch", "--input", file.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let s = v["stretch"].as_f64().unwrap();
    assert!(
        (s - 2.0 * 26.0f64.sqrt() / 10.0).abs() < 1e-9,
        "stretch {s}"
    );
    std::fs::remove_file(file).ok();
}

#[test]
fn stretch_malformed_input_exits_2() {
    let file = write_temp("bad", "0,0\nx;y\n1,1\n");
    let out = run(&["stretch", "--input", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(file).ok();

    let file = write_temp("few", "0,0\n1,0\n");
    let out = run(&["stretch", "--input", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(file).ok();

    let out = run(&["stretch", "--input", "/nonexistent/points.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stretch_pair_reports_chain_and_jitters_degeneracies() {
    // Kite: segment 0-1 crosses the CD gate; two circumcircles.
    let file = write_temp("pairkite", "0,0\n10,0\n5,1\n5,-1\n");
    let out = run(&[
        "stretch",
        "--input",
        file.to_str().unwrap(),
        "--pair",
        "0",
        "1",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let pair = &v["pair"];
    assert_eq!(pair["edge"], false);
    assert_eq!(pair["jittered"], false);
    assert_eq!(pair["circles"], 2);
    assert_eq!(pair["obstructed"], false);
    assert!((pair["d"].as_f64().unwrap() - 10.0).abs() < 1e-9);
    assert!(pair["upsilon"].as_f64().unwrap() < 0.0);
    std::fs::remove_file(file).ok();

    // Segment 0-2 passes exactly through vertex 1: the CLI must retry with
    // the documented jitter and record it.
    let file = write_temp("pairdeg", "0,0\n1,0\n2,0\n1,1\n1,-1\n");
    let out = run(&[
        "stretch",
        "--input",
        file.to_str().unwrap(),
        "--pair",
        "0",
        "2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["pair"]["jittered"], true);
    std::fs::remove_file(file).ok();
}

#[test]
fn random_triangles_all_stretch_one() {
    let out = run(&["random", "--n", "3", "--trials", "5", "--seed", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("seed"))
        .collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let stretch = row.split(',').nth(3).unwrap();
        assert!(stretch.starts_with("1.0000000000000000"), "{row}");
    }
}

#[test]
fn random_is_byte_deterministic_and_bounded() {
    let args = ["random", "--n", "30", "--trials", "20", "--seed", "42"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(
        a.stdout, b.stdout,
        "identical seeds must give identical bytes"
    );
    for row in stdout(&a)
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("seed"))
    {
        let stretch: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!((1.0..1.998).contains(&stretch), "{row}");
    }
}

#[test]
fn random_desk_scale_stays_under_bound() {
    let out = run(&["random", "--n", "50", "--trials", "200", "--seed", "42"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut rows = 0;
    for row in text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("seed"))
    {
        let stretch: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!((1.0..1.998).contains(&stretch), "{row}");
        rows += 1;
    }
    assert_eq!(rows, 200);
}

#[test]
fn chain_suite_thousand_chains_clean() {
    let out = run(&[
        "chain-suite",
        "--count",
        "1000",
        "--max-n",
        "6",
        "--seed",
        "7",
    ]);
    assert!(out.status.success(), "suite reported violations");
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["chains"], 1000);
    assert!(v["max_upsilon"].as_f64().unwrap() < 0.0);
    assert!(v["max_ratio"].as_f64().unwrap() < 1.998);
}

#[test]
fn random_rejects_bad_params() {
    assert_eq!(
        run(&["random", "--n", "2", "--trials", "5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["random", "--n", "10", "--trials", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn certify_default_passes() {
    let out = run(&["certify"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["L"], 16.0);
    assert_eq!(v["inequalities"].as_array().unwrap().len(), 4);
    for ineq in v["inequalities"].as_array().unwrap() {
        assert!(ineq["apex"].as_f64().unwrap() < 0.0);
        assert_eq!(ineq["status"], "certified_negative");
    }
}

#[test]
fn certify_broken_lambda_exits_1() {
    let out = run(&["certify", "--lambda", "2.2"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn certify_absurd_guard_exits_1() {
    let out = run(&["certify", "--guard", "-10"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["pass"], false);
    // The raw apexes stay negative; only the guard is unreachable.
    for ineq in v["inequalities"].as_array().unwrap() {
        assert!(ineq["apex"].as_f64().unwrap() < 0.0);
    }
}

#[test]
fn chain_suite_clean_and_deterministic() {
    let args = [
        "chain-suite",
        "--count",
        "60",
        "--max-n",
        "6",
        "--seed",
        "7",
    ];
    let a = run(&args);
    assert!(a.status.success(), "suite reported violations");
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(stdout(&a).trim()).unwrap();
    assert_eq!(v["chains"], 60);
    let violations = v["violations"].as_object().unwrap();
    for (k, count) in violations {
        assert_eq!(count.as_u64(), Some(0), "violations in {k}");
    }
    assert!(v["max_upsilon"].as_f64().unwrap() < 0.0);
    assert!(v["max_ratio"].as_f64().unwrap() < 1.998);
}

#[test]
fn chain_suite_evaluates_chain_file() {
    // The symmetric two-unit-circle chain with collinear terminals:
    // |P| = 4*pi/3, |D| = 3, Upsilon = -1.31172182.
    let file = write_temp("chain", "0,0,1\n1,0,1\nu:-1,0 v:2,0\n");
    let out = run(&[
        "chain-suite",
        "--input",
        file.to_str().unwrap(),
        "--pairs",
        "16",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["n"], 2);
    let y = v["terminal_upsilon"].as_f64().unwrap();
    assert!((y - (-1.311721820802275)).abs() < 1e-5, "upsilon {y}");
    let p = v["terminal_p"].as_f64().unwrap();
    let d = v["terminal_d"].as_f64().unwrap();
    assert!((p - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-9);
    assert!((d - 3.0).abs() < 1e-12);
    std::fs::remove_file(file).ok();

    let bad = write_temp("chain-bad", "0,0,1\n3,0,1\n");
    let out = run(&["chain-suite", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(bad).ok();
}

#[test]
fn chain_suite_rejects_bad_params() {
    assert_eq!(
        run(&["chain-suite", "--count", "0", "--max-n", "6"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["chain-suite", "--count", "5", "--max-n", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn lowerbound_reaches_documented_stretch() {
    let out = run(&["lowerbound", "--n", "64"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let s = v["stretch"].as_f64().unwrap();
    assert!((1.4..1.998).contains(&s), "stretch {s}");

    let out = run(&["lowerbound", "--n", "8"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let s = v["stretch"].as_f64().unwrap();
    assert!(s > 1.1 && s < 1.998, "stretch {s}");

    assert_eq!(run(&["lowerbound", "--n", "7"]).status.code(), Some(2));
}

#[test]
fn thread_override_does_not_change_results() {
    let mut base = Command::new(env!("CARGO_BIN_EXE_chainstretch"));
    base.args(["random", "--n", "25", "--trials", "8", "--seed", "9"]);
    let a = base.output().unwrap();
    let mut forced = Command::new(env!("CARGO_BIN_EXE_chainstretch"));
    forced
        .args(["random", "--n", "25", "--trials", "8", "--seed", "9"])
        .env("STRETCH_THREADS", "1");
    let b = forced.output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}
