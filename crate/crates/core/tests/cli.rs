use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use torichodge::cli::run;

fn corpus(name: &str) -> String {
    format!("{}/../../corpus/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn machine(input: &str, args: &[&str]) -> torichodge::cli::Outcome {
    let mut full = vec!["torichodge".to_string(), "--output".into(), "machine".into(), "--input".into(), input.into()];
    full.extend(args.iter().map(|s| s.to_string()));
    run(full)
}

const GOLDEN: &[(&str, &str, &[&str])] = &[
    ("fan_check_f1", "f1", &["fan-check"]),
    ("fan_check_blowup_a1p2", "blowup_a1p2", &["fan-check"]),
    ("divisor_p2_zero_ample", "p2", &["divisor", "--name", "zero", "--mode", "ample"]),
    ("divisor_p2_two_h_sections", "p2", &["divisor", "--name", "two_H", "--mode", "sections"]),
    ("divisor_blowup_ample_sections", "blowup_a1p1", &["divisor", "--name", "ample", "--mode", "sections"]),
    ("cohomology_p1_minus_two", "p1", &["cohomology", "--p", "0", "--divisor", "minus_two"]),
    ("cohomology_p2_tilde_one_two_h", "p2", &["cohomology", "--p", "1", "--divisor", "two_H"]),
    ("cohomology_f1_logd", "f1", &["cohomology", "--p", "1", "--model", "logd"]),
    ("hodge_p3_cubic_oracle", "p3", &["hodge", "--polynomial", "fermat_cubic", "--p", "1", "--oracle"]),
    ("hodge_p1xp1_curve", "p1xp1", &["hodge", "--polynomial", "curve22", "--p", "0", "--oracle"]),
    (
        "hodge_blowup_fibers",
        "blowup_a1p1",
        &["hodge", "--polynomial", "degree3", "--p", "0", "--fiber", "general", "--fiber", "special"],
    ),
    ("verify_euler_p2", "p2", &["verify", "--suite", "euler"]),
    ("verify_residue_blowup", "blowup_a1p1", &["verify", "--suite", "residue", "--p", "1", "--r", "1"]),
    ("verify_bott_f1", "f1", &["verify", "--suite", "bott", "--divisor", "ample"]),
    ("verify_main_p2", "p2", &["verify", "--suite", "main", "--polynomial", "fermat_cubic"]),
    ("verify_euler_identity_blowup", "blowup_a1p1", &["verify", "--suite", "euler-identity", "--polynomial", "degree4"]),
];

#[test]
fn machine_output_matches_goldens() {
    let update = std::env::var_os("UPDATE_GOLDENS").is_some();
    let mut mismatches = Vec::new();
    for (name, input, args) in GOLDEN {
        let out = machine(&corpus(input), args);
        assert_eq!(out.code, 0, "{name}: {}", out.stderr);
        let path = golden_dir().join(format!("{name}.json"));
        if update {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
        if expected != out.stdout {
            mismatches.push(format!("{name}:\n--- expected\n{expected}\n--- actual\n{}", out.stdout));
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn output_is_deterministic() {
    for (name, input, args) in &GOLDEN[..6] {
        let a = machine(&corpus(input), args);
        let b = machine(&corpus(input), args);
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn machine_output_has_sorted_keys() {
    let out = machine(&corpus("f1"), &["fan-check"]);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

fn temp_input(tag: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("torichodge-cli-{}-{tag}.json", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn malformed_cone_index_exits_with_two() {
    let path = temp_input("badcone", r#"{"version": 1, "rank": 2, "rays": [[1, 0], [0, 1]], "cones": [[0, 5]]}"#);
    let out = machine(path.to_str().unwrap(), &["fan-check"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("cones[0]"), "{}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("ray 5"));
    std::fs::remove_file(path).ok();
}

#[test]
fn invalid_fan_is_a_verification_failure() {
    // Two overlapping cones.
    let path = temp_input(
        "overlap",
        r#"{"version": 1, "rank": 2, "rays": [[1, 0], [0, 1], [1, 1]], "cones": [[0, 1], [0, 2]]}"#,
    );
    let out = machine(path.to_str().unwrap(), &["fan-check"]);
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["valid"], Value::Bool(false));
    assert!(!v["violations"].as_array().unwrap().is_empty());
    std::fs::remove_file(path).ok();
}

#[test]
fn failed_hypotheses_are_itemized() {
    let out = machine(&corpus("p2"), &["hodge", "--polynomial", "fermat_cubic", "--p", "2"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("hypotheses not satisfied"));
    assert!(out.stderr.contains("  - form degree 2"), "{}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["failed_hypotheses"].as_array().unwrap().len(), 1);
}

#[test]
fn non_nef_twist_fails_bott_preconditions() {
    let out = machine(&corpus("p2"), &["verify", "--suite", "bott", "--divisor", "minus_H"]);
    assert_eq!(out.code, 2, "{}", out.stderr);
}

#[test]
fn unknown_names_and_usage_errors() {
    assert_eq!(machine(&corpus("p2"), &["divisor", "--name", "missing", "--mode", "nef"]).code, 2);
    assert_eq!(machine(&corpus("p2"), &["cohomology", "--p", "1", "--model", "w:x"]).code, 2);
    assert_eq!(machine("/nonexistent/input.json", &["fan-check"]).code, 2);
    assert_eq!(run(["torichodge", "frobnicate"]).code, 2);
    assert_eq!(run(["torichodge", "--help"]).code, 0);
}

#[test]
fn binary_prints_human_output() {
    let out = Command::new(env!("CARGO_BIN_EXE_torichodge"))
        .args(["--input", &corpus("p4"), "hodge", "--polynomial", "fermat_quintic", "--p", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dimension       101"), "{text}");
    let out = Command::new(env!("CARGO_BIN_EXE_torichodge"))
        .args(["--input", &corpus("p2"), "hodge", "--polynomial", "fermat_cubic", "--p", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
