use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn shorlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shorlab"))
        .args(args)
        .env_remove("SHORLAB_MAX_QUBITS")
        .output()
        .expect("binary runs")
}

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas")
        .join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, doc: &Value) {
    let validator = jsonschema::validator_for(&schema(schema_name)).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:?}");
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn factors_fifteen() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    let out = shorlab(&[
        "factor",
        "-N",
        "15",
        "-a",
        "7",
        "--trials",
        "50",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_valid("factor_report.schema.json", &doc);
    assert_eq!(doc["factors"], serde_json::json!([3, 5]));
    assert_eq!(doc["order"], 4);
}

#[test]
fn every_variant_output_matches_schema() {
    for variant in [
        "standard",
        "uninit",
        "trinary_uninit",
        "coset",
        "short_factor",
    ] {
        let out = shorlab(&[
            "factor",
            "-N",
            "15",
            "--variant",
            variant,
            "--trials",
            "4",
            "--seed",
            "1",
            "--strict-footprint",
            "--xmax",
            "8",
        ]);
        assert!(matches!(out.status.code(), Some(0) | Some(2)), "{variant}");
        let doc = stdout_json(&out);
        assert_valid("factor_report.schema.json", &doc);
        assert_eq!(doc["experiment"]["config"]["variant"], variant);
    }
}

#[test]
fn default_base_is_smallest_coprime() {
    let out = shorlab(&["factor", "-N", "21", "--trials", "2"]);
    assert_eq!(stdout_json(&out)["experiment"]["config"]["base"], 2);
}

#[test]
fn input_errors_exit_one() {
    for args in [
        vec!["factor", "-N", "16"],
        vec!["factor", "-N", "15", "-a", "5"],
        vec!["factor", "-N", "15", "-a", "15"],
        vec!["factor", "-N", "15", "--trials", "0"],
        vec!["factor", "-N", "2049"],
        vec!["factor", "-N", "15", "--variant", "quaternary"],
        vec!["fidelity", "-N", "15", "--xmax", "0"],
        vec!["resources", "--bits", "1"],
        vec!["split", "-N", "15", "-a", "6"],
    ] {
        assert_eq!(shorlab(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn minus_one_square_root_is_a_post_processing_failure() {
    let out = shorlab(&[
        "factor", "-N", "15", "-a", "14", "--trials", "20", "--seed", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["order"], 2);
    assert!(doc["factors"].is_null());
    assert!(doc["failure"].as_str().unwrap().contains("-1"));
}

#[test]
fn size_guard_respects_env_budget() {
    let out = Command::new(env!("CARGO_BIN_EXE_shorlab"))
        .args(["factor", "-N", "15", "--trials", "1"])
        .env("SHORLAB_MAX_QUBITS", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn resources_table_and_json() {
    let out = shorlab(&["resources", "--bits", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8(out.stdout).unwrap();
    let row = table
        .lines()
        .find(|l| l.starts_with("short_factor"))
        .unwrap();
    assert_eq!(row.split_whitespace().nth(1), Some("14"));

    let doc = stdout_json(&shorlab(&["resources", "--bits", "8", "--format", "json"]));
    assert_valid("resources_report.schema.json", &doc);
}

#[test]
fn split_of_one_and_random_pairs() {
    let doc = stdout_json(&shorlab(&[
        "split", "-N", "15", "-a", "1", "--format", "json",
    ]));
    assert_valid("split_report.schema.json", &doc);
    assert_eq!(
        (doc["r"].as_i64(), doc["r_prime"].as_u64()),
        (Some(1), Some(1))
    );

    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut checked = 0;
    while checked < 25 {
        let n = 3 + 2 * (next() % 999);
        let a = 1 + next() % (n - 1);
        let out = shorlab(&["split", "-N", &n.to_string(), "-a", &a.to_string()]);
        if out.status.code() == Some(1) {
            continue; // not coprime
        }
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(": ok"), "{text}");
        checked += 1;
    }
}

#[test]
fn fidelity_csv_is_deterministic() {
    let run = || {
        shorlab(&[
            "fidelity", "-N", "21", "--xmax", "500", "--adds", "30", "--seed", "8",
        ])
        .stdout
    };
    let a = run();
    assert_eq!(a, run());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("step,c,value,per_step,cumulative\n"));
    assert_eq!(text.lines().count(), 31);

    let doc = stdout_json(&shorlab(&[
        "fidelity", "--xmax", "100", "--adds", "5", "--format", "json",
    ]));
    assert_valid("fidelity_trace.schema.json", &doc);
}

#[test]
fn default_fidelity_run_stays_above_ninety_nine_percent() {
    let out = shorlab(&["fidelity", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    let cumulative: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!(cumulative >= 0.99);
}

#[test]
fn single_rung_fidelity_is_degenerate() {
    let out = shorlab(&["fidelity", "-N", "15", "--xmax", "1", "--adds", "20"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let per_step: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(per_step < 1e-12 || (per_step - 1.0).abs() < 1e-12, "{line}");
    }
}

#[test]
fn factor_csv_is_deterministic_across_jobs() {
    let run = |jobs: &str| {
        shorlab(&[
            "factor", "-N", "21", "--trials", "16", "--seed", "4", "--jobs", jobs, "--format",
            "csv",
        ])
        .stdout
    };
    assert_eq!(run("1"), run("4"));
}
