//! End-to-end tests for the `superortho` binary: exit codes, report
//! shapes, determinism across worker counts, and rejection of malformed
//! input without panics.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superortho"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn binary")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code (killed by signal?)")
}

#[test]
fn classify_passes_on_disjoint_indicator_complements() {
    let out = run(&[
        "classify",
        "--builtin",
        "indicator_complement",
        "--n",
        "4",
        "--r",
        "2",
        "--types",
        "IV",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["types"]["IV"]["holds"], serde_json::json!(true));
}

#[test]
fn classify_reports_a_witness_and_exits_one() {
    let out = run(&[
        "classify",
        "--builtin",
        "haar_grid",
        "--depth",
        "4",
        "--r",
        "2",
        "--types",
        "II",
    ]);
    assert_eq!(code(&out), 1);
    let json = stdout_json(&out);
    assert_eq!(json["types"]["II"]["holds"], serde_json::json!(false));
    assert!(json["types"]["II"]["witness"].is_object());
}

#[test]
fn malformed_family_json_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["classify", "--file", path.to_str().unwrap(), "--r", "2"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn construct_rejects_a_family_that_is_too_small() {
    let out = run(&["construct", "--kind", "typeiv", "--k", "2", "--n", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn construct_haar_grid_has_one_member_per_interval() {
    let out = run(&["construct", "--kind", "haar_grid", "--depth", "2"]);
    assert_eq!(code(&out), 0);
    let json = stdout_json(&out);
    assert_eq!(json["members"].as_array().unwrap().len(), 3);
}

#[test]
fn constructed_family_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fam.json");
    let out = run(&[
        "construct",
        "--kind",
        "typeiv",
        "--k",
        "2",
        "--n",
        "6",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["members"].as_array().unwrap().len(), 6);

    // The written file loads back into every verifier.
    let out = run(&[
        "verify",
        "square",
        "--file",
        path.to_str().unwrap(),
        "--r",
        "2",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["holds"], serde_json::json!(true));
    assert_eq!(json["bound"]["method"], serde_json::json!("baseline"));
    assert_eq!(json["bound"]["c_pow_2r"], serde_json::json!("2116"));
}

fn write_pair_sequences(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("seqs.json");
    let scalar = |n: i64| serde_json::json!([n.to_string(), "0", "0", "0"]);
    let json = serde_json::json!({
        "k": 2,
        "sequences": [[scalar(1), scalar(2)], [scalar(3), scalar(4)]],
    });
    std::fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    path
}

#[test]
fn qk_eval_agrees_across_all_three_evaluators() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_pair_sequences(dir.path());
    // s(a¹⊙a²) = 1·3 + 2·4 = 11, s(a¹)s(a²) = 3·7 = 21, Q₂ = 21 − 11.
    for method in ["partition", "recursive", "bruteforce"] {
        let out = run(&[
            "qk",
            "eval",
            "--file",
            path.to_str().unwrap(),
            "--method",
            method,
        ]);
        assert_eq!(code(&out), 0);
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "10");
    }
}

#[test]
fn qk_eval_rejects_an_unknown_method() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_pair_sequences(dir.path());
    let out = run(&["qk", "eval", "--file", path.to_str().unwrap(), "--method", "magic"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn qk_check_campaign_finds_no_violations() {
    let out = run(&[
        "qk", "check", "--k", "4", "--trials", "50", "--seed", "42", "--dim", "6",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["violations"], serde_json::json!(0));
    assert_eq!(json["trials"], serde_json::json!(50));
}

#[test]
fn qk_check_requires_at_least_two_sequences() {
    let out = run(&["qk", "check", "--k", "1", "--trials", "5", "--dim", "3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn qk_equiv_covers_random_and_grid_instances() {
    let out = run(&[
        "qk", "equiv", "--trials", "20", "--pm1-k", "2", "--pm1-dim", "3",
    ]);
    assert_eq!(code(&out), 0);
    let json = stdout_json(&out);
    assert_eq!(json["random"]["mismatches"], serde_json::json!(0));
    assert_eq!(json["pm1_grid"]["mismatches"], serde_json::json!(0));
    assert_eq!(json["pm1_grid"]["instances"], serde_json::json!(98));
}

#[test]
fn verify_square_rejects_r_zero() {
    let out = run(&[
        "verify", "square", "--builtin", "typeiv", "--k", "2", "--n", "4", "--r", "0",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_square_accepts_a_user_constant() {
    // The pairwise-disjoint family satisfies the estimate with constant 1.
    let out = run(&[
        "verify",
        "square",
        "--builtin",
        "indicator_complement",
        "--n",
        "4",
        "--r",
        "2",
        "--constant",
        "user:1",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["bound"]["method"], serde_json::json!("user"));
    // Whatever the verdict, the exit code must mirror `holds`.
    let expect = if json["holds"] == serde_json::json!(true) { 0 } else { 1 };
    assert_eq!(code(&out), expect);
}

#[test]
fn verify_intermediate_holds_on_the_haar_family() {
    let out = run(&[
        "verify", "intermediate", "--builtin", "haar_grid", "--depth", "3", "--r", "2",
    ]);
    assert_eq!(code(&out), 0);
    let json = stdout_json(&out);
    assert_eq!(json["holds"], serde_json::json!(true));
    assert_eq!(json["factor"], serde_json::json!("23"));
}

#[test]
fn verify_decoupling_certifies_irrational_roots() {
    let out = run(&[
        "verify", "decoupling", "--builtin", "indicator_complement", "--n", "4", "--r", "2",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["holds"], serde_json::json!(true));
    assert_eq!(json["exact"], serde_json::json!(false));
    assert!(json["precision_bits"].is_number());
}

#[test]
fn verify_haar_sqfn_passes_on_a_mean_zero_step_function() {
    // ±1 on the two halves of [0,1): mean zero, constant on the depth-1 grid.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    let json = serde_json::json!({
        "breakpoints": ["0", "1/2", "1"],
        "values": [["1", "0", "0", "0"], ["-1", "0", "0", "0"]],
    });
    std::fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    let out = run(&[
        "verify",
        "haar-sqfn",
        "--fn",
        path.to_str().unwrap(),
        "--depth",
        "1",
        "--r",
        "2",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["reconstructed"], serde_json::json!(true));
    assert_eq!(json["estimate"]["holds"], serde_json::json!(true));
}

#[test]
fn verify_haar_sqfn_rejects_a_function_with_nonzero_mean() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    let json = serde_json::json!({
        "breakpoints": ["0", "1"],
        "values": [["1", "0", "0", "0"]],
    });
    std::fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    let out = run(&[
        "verify", "haar-sqfn", "--fn", path.to_str().unwrap(), "--depth", "1", "--r", "2",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn reports_are_identical_across_worker_counts() {
    let args = [
        "qk", "check", "--k", "3", "--trials", "40", "--seed", "7", "--dim", "5",
    ];
    let one = bin().args(args).env("SUPERORTHO_THREADS", "1").output().unwrap();
    let four = bin().args(args).env("SUPERORTHO_THREADS", "4").output().unwrap();
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn bench_classify_requires_sizes() {
    let out = run(&["bench", "classify", "--sizes"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bench_qk_matches_brute_force_on_the_overlap() {
    let out = run(&["bench", "qk", "--k", "3", "--dims", "4,8"]);
    assert_eq!(code(&out), 0);
    let rows = stdout_json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row["equal"], serde_json::json!(true));
    }
}
