//! End-to-end tests for the `tailcert` binary: frozen output, byte
//! stability across reruns, config merging, and exit codes.

use std::process::{Command, Output};

fn tailcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn exact_walk_output_is_frozen() {
    let out = tailcert(&["exact", "--kind", "walk", "--n", "16", "--t", "1"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "Pr[S_16 >= 1]: log2 = -1.315416, value = 4.018097e-1, exact = 26333/65536\n"
    );
}

#[test]
fn bound_output_is_stable_and_correct() {
    let args = ["bound", "--family", "poor-fair", "--n", "64", "--k", "2"];
    let a = tailcert(&args);
    let b = tailcert(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "stdout must be byte-identical across runs");
    let text = stdout(&a);
    assert!(text.contains("family: poor-fair"));
    assert!(text.contains("claim: Pr[X >= 16] satisfies truth<=bound"));
    assert!(text.contains("exact = 1/2"));
    assert!(text.contains("valid: true"));
}

#[test]
fn bound_json_is_machine_readable() {
    let out = tailcert(&[
        "bound", "--json", "--family", "poor-fair", "--n", "64", "--k", "2",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(doc["family"], "poor-fair");
    assert_eq!(doc["direction"], "truth<=bound");
    assert_eq!(doc["log2_bound"], -1.0);
    assert_eq!(doc["exact_bound"], "1/2");
    assert_eq!(doc["valid"], true);
}

#[test]
fn auto_family_routes_small_deviations() {
    let out = tailcert(&[
        "bound", "--json", "--family", "auto", "--mu", "100", "--n", "10000", "--t", "120",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(doc["family"], "hoeffding-small");
    assert_eq!(doc["log2_bound"], -8.0);
}

#[test]
fn inapplicable_flags_are_rejected() {
    let out = tailcert(&[
        "bound", "--family", "poor-fair", "--n", "64", "--k", "2", "--p", "1/8",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--p does not apply"));

    let out = tailcert(&["bound", "--family", "poor-fair", "--n", "64"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--k is required"));

    let out = tailcert(&["bound", "--family", "no-such-family", "--n", "64"]);
    assert_eq!(out.status.code(), Some(2));

    let out = tailcert(&["exact", "--kind", "walk", "--n", "16", "--t", "1", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--m does not apply"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = dir.path().join("bound.json");
    std::fs::write(&cfg, r#"{"n": 64, "k": 2}"#).expect("write config");
    let cfg = cfg.to_str().expect("utf-8 path");

    let from_config = tailcert(&["bound", "--family", "poor-fair", "--config", cfg]);
    assert!(from_config.status.success(), "{}", stderr(&from_config));
    let explicit = tailcert(&["bound", "--family", "poor-fair", "--n", "64", "--k", "2"]);
    assert_eq!(from_config.stdout, explicit.stdout);

    // An explicit flag overrides the config value: k = 4 gives 2^(-2).
    let overridden = tailcert(&[
        "bound", "--family", "poor-fair", "--config", cfg, "--k", "4",
    ]);
    assert!(overridden.status.success());
    let text = stdout(&overridden);
    assert!(text.contains("Pr[X >= 32]"), "{text}");
    assert!(text.contains("exact = 1/4"), "{text}");
}

#[test]
fn simulate_is_deterministic_and_plausible() {
    let args = [
        "simulate", "--strategy", "rademacher", "--v", "4", "--n", "8", "--threshold", "2",
        "--trials", "2000", "--seed", "1", "--json",
    ];
    let a = tailcert(&args);
    let b = tailcert(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout, "same seed, same bytes");
    let doc: serde_json::Value = serde_json::from_str(&stdout(&a)).expect("valid JSON");
    assert_eq!(doc["trials"], 2000);
    // Pr[S_4 >= 2] = 5/16; with 2000 trials the count concentrates hard.
    let successes = doc["successes"].as_u64().expect("count");
    assert!((500..=750).contains(&successes), "successes = {successes}");
}

#[test]
fn simulate_dump_writes_a_trajectory() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("traj.csv");
    let out = tailcert(&[
        "simulate", "--strategy", "rademacher", "--v", "4", "--n", "8", "--threshold", "2",
        "--trials", "10", "--seed", "1", "--dump", path.to_str().expect("utf-8 path"),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).expect("trajectory file");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,x,z,v_spent");
    assert_eq!(lines.len(), 5, "header plus one row per unit step: {text}");
}

#[test]
fn verify_writes_reproducible_reports() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for path in [&out_a, &out_b] {
        let out = tailcert(&[
            "verify", "--suite", "geo", "--scale", "quick", "--seed", "0", "--out",
            path.to_str().expect("utf-8 path"),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert!(stderr(&out).contains("overall: PASS"));
    }
    let a = std::fs::read(&out_a).expect("report a");
    let b = std::fs::read(&out_b).expect("report b");
    assert_eq!(a, b, "reports must be byte-identical across reruns");
    let text = String::from_utf8(a).expect("utf-8 report");
    assert!(text.starts_with(
        "suite,case_id,n,p_num,p_den,k,r,v,threshold,truth_kind,log2_truth,ci_low,ci_high,log2_bound,direction,pass\n"
    ));
}

#[test]
fn verify_unknown_suite_is_a_usage_error() {
    let out = tailcert(&["verify", "--suite", "nope", "--scale", "quick"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown suite"));
}
