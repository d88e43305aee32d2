//! End-to-end runs of the `macvlc` binary.

use std::process::{Command, Output};

fn macvlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macvlc"))
        .args(args)
        .env_remove("MACVLC_SEED")
        .output()
        .expect("run macvlc")
}

fn stdout(args: &[&str]) -> String {
    let out = macvlc(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn stderr_of_failure(args: &[&str]) -> String {
    let out = macvlc(args);
    assert!(!out.status.success(), "{args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

const ADDER_RMAC: &str = "R1_bits,R2_bits
0.000000,0.000000
1.000000,0.000000
1.000000,0.500000
0.500000,1.000000
0.000000,1.000000
";

#[test]
fn capacity_of_adder() {
    let out = stdout(&["capacity", "--builtin", "adder"]);
    assert!(out.starts_with("C1 = 1.000000 bits/use (0.693147 nats/use)"), "{out}");
    assert!(out.contains("I(X1,X2;Y) = 1.500000 bits/use (1.039721 nats/use)"));

    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["capacity", "--builtin", "adder", "--format", "json"])).unwrap();
    assert!((json["c1"]["bits"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((json["c1"]["nats"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-9);
}

#[test]
fn capacity_at_given_input() {
    let out = stdout(&["capacity", "--builtin", "adder", "--p1", "1,0", "--p2", "0.5,0.5"]);
    assert!(out.contains("I(X1;Y|X2) = 0.000000 bits/use"), "{out}");
    assert!(out.contains("I(X2;Y|X1) = 1.000000 bits/use"), "{out}");
    let err = stderr_of_failure(&["capacity", "--builtin", "adder", "--p1", "0.6,0.6"]);
    assert!(err.starts_with("error: "), "{err}");
}

#[test]
fn region_exports() {
    assert_eq!(stdout(&["region", "--builtin", "adder"]), ADDER_RMAC);
    assert_eq!(
        stdout(&[
            "region",
            "--builtin",
            "adder",
            "--kind",
            "outer",
            "--r1",
            "1",
            "--r2",
            "1"
        ]),
        ADDER_RMAC
    );
    let rect = "R1_bits,R2_bits
0.000000,0.000000
1.000000,0.000000
1.000000,1.000000
0.000000,1.000000
";
    assert_eq!(stdout(&["region", "--builtin", "adder", "--kind", "rect"]), rect);
    assert_eq!(
        stdout(&[
            "region",
            "--builtin",
            "adder",
            "--kind",
            "outer",
            "--r1",
            "0",
            "--r2",
            "0"
        ]),
        rect
    );
    let err = stderr_of_failure(&[
        "region",
        "--builtin",
        "adder",
        "--kind",
        "outer",
        "--r1",
        "0",
        "--r2",
        "0.5",
    ]);
    assert!(err.contains("degenerate"), "{err}");

    let json: serde_json::Value = serde_json::from_str(&stdout(&[
        "region",
        "--builtin",
        "adder",
        "--kind",
        "outer",
        "--r1",
        "0.5",
        "--r2",
        "0.5",
        "--format",
        "json",
    ]))
    .unwrap();
    assert!(json["vertices_bits"].as_array().unwrap().len() >= 4, "{json}");
}

#[test]
fn feedback_region_runs_with_default_grid() {
    let out = stdout(&[
        "region",
        "--builtin",
        "noisy_adder(0.1)",
        "--kind",
        "feedback",
        "--r1",
        "0.5",
        "--r2",
        "0.5",
    ]);
    assert!(out.starts_with("R1_bits,R2_bits\n0.000000,0.000000\n"), "{out}");
}

#[test]
fn curve_rows() {
    let out = stdout(&["curve", "--builtin", "adder", "--p-grid", "3"]);
    let want = "p,R1_bits,R2_bits,lambda,R1_ts_bits,R2_ts_bits
0.000000,0.666667,1.000000,0.000000,0.662230,0.990000
0.500000,0.800000,0.800000,0.500000,0.793603,0.793603
1.000000,1.000000,0.666667,1.000000,0.990000,0.662230
";
    assert_eq!(out, want);
}

#[test]
fn malformed_channel_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"x1_size\": 2,\n").unwrap();
    let err = stderr_of_failure(&["capacity", "--channel", bad.to_str().unwrap()]);
    assert!(err.contains("line 2, column 0"), "{err}");

    let unnormalized = dir.path().join("rows.json");
    std::fs::write(
        &unnormalized,
        r#"{"x1_size":1,"x2_size":1,"y_size":2,"transition":[0.5,0.4]}"#,
    )
    .unwrap();
    let err = stderr_of_failure(&["capacity", "--channel", unnormalized.to_str().unwrap()]);
    assert!(err.contains("sums to 0.9"), "{err}");

    let missing = dir.path().join("missing.json");
    let err = stderr_of_failure(&["capacity", "--channel", missing.to_str().unwrap()]);
    assert!(err.contains("missing.json"), "{err}");

    let ok = dir.path().join("bsc.json");
    std::fs::write(
        &ok,
        r#"{"x1_size":2,"x2_size":1,"y_size":2,"transition":[0.9,0.1,0.1,0.9]}"#,
    )
    .unwrap();
    let out = stdout(&["capacity", "--channel", ok.to_str().unwrap()]);
    assert!(out.starts_with("C1 = 0.531004 bits/use"), "{out}");
}

#[test]
fn usage_errors() {
    let err = stderr_of_failure(&["simulate", "--builtin", "adder", "--trials", "0"]);
    assert!(err.contains("--trials must be at least 1"), "{err}");
    let err = stderr_of_failure(&["simulate", "--builtin", "adder", "--workers", "0", "--trials", "5"]);
    assert!(err.contains("--workers"), "{err}");
    stderr_of_failure(&["capacity"]);
    stderr_of_failure(&["capacity", "--builtin", "adder", "--channel", "x.json"]);
    let err = stderr_of_failure(&["capacity", "--builtin", "nope"]);
    assert!(err.contains("nope"), "{err}");
    stderr_of_failure(&["simulate", "--builtin", "adder", "--rule", "maximum_likelihood"]);
}

#[test]
fn simulate_is_deterministic_and_seed_env_wins() {
    let args = [
        "simulate",
        "--builtin",
        "noisy_adder(0.1)",
        "--m1",
        "8",
        "--m2",
        "8",
        "--trials",
        "200",
        "--seed",
        "4",
    ];
    let a = stdout(&args);
    let mut more = args.to_vec();
    more.extend(["--workers", "3"]);
    assert_eq!(a, stdout(&more));

    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["config"]["master_seed"], 4);
    assert_eq!(v["summary"]["trials_used"], 200);
    assert!(v["config"].get("workers").is_none());

    let env = Command::new(env!("CARGO_BIN_EXE_macvlc"))
        .args(args)
        .env("MACVLC_SEED", "9")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(v["config"]["master_seed"], 9);

    let bad = Command::new(env!("CARGO_BIN_EXE_macvlc"))
        .args(args)
        .env("MACVLC_SEED", "minus one")
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn simulate_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.csv");
    stdout(&[
        "simulate",
        "--builtin",
        "adder",
        "--m1",
        "4",
        "--m2",
        "4",
        "--trials",
        "20",
        "--records",
        path.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("trial,n1,n2,error,capped"));
    assert_eq!(lines.count(), 20);
}

#[test]
fn simulate_scheme_files() {
    let dir = tempfile::tempdir().unwrap();
    let concat = dir.path().join("concat.json");
    std::fs::write(&concat, r#"{"type":"concat","m1":16,"m2":16,"seed":2,"order":"v2"}"#).unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&[
        "simulate",
        "--builtin",
        "noisy_adder(0.1)",
        "--scheme",
        concat.to_str().unwrap(),
        "--trials",
        "50",
    ]))
    .unwrap();
    assert_eq!(v["summary"]["trials_used"], 50);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"type":"mixed","m1":16,"m2":16,"seed":2}"#).unwrap();
    let err = stderr_of_failure(&["simulate", "--builtin", "adder", "--scheme", bad.to_str().unwrap()]);
    assert!(err.contains("lambda"), "{err}");
}

#[test]
fn sweep_rows() {
    let out = stdout(&[
        "sweep",
        "--builtin",
        "noisy_adder(0.1)",
        "--m-ratio-grid",
        "1,2",
        "--m2",
        "8",
        "--trials",
        "100",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "log_m1_over_log_m2,m1,m2,rate1_bits_per_use,rate2_bits_per_use,pe,pe_lo,pe_hi,capped_fraction"
    );
    assert!(lines[1].starts_with("1.000000,8,8,"), "{out}");
    assert!(lines[2].starts_with("2.000000,64,8,"), "{out}");
    let err = stderr_of_failure(&["sweep", "--builtin", "adder", "--m-ratio-grid=-1"]);
    assert!(err.contains("positive"), "{err}");
}

#[test]
fn check_suites() {
    for suite in ["drift", "roots"] {
        let out = stdout(&["check", "--builtin", "noisy_adder(0.1)", "--suite", suite]);
        assert!(out.lines().all(|l| !l.starts_with("FAIL")), "{out}");
        assert!(out.lines().any(|l| l.starts_with("PASS")), "{out}");
    }
    let out = stdout(&[
        "check",
        "--builtin",
        "noisy_adder(0.1)",
        "--suite",
        "wald",
        "--m",
        "16",
        "--trials",
        "500",
    ]);
    assert!(out.starts_with("PASS genie_cond_user1"), "{out}");
}
