use std::path::{Path, PathBuf};

use assert_cmd::Command;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn dgk(args: &[&str]) -> assert_cmd::assert::Assert {
    Command::cargo_bin("dgk").unwrap().current_dir(fixtures()).args(args).assert()
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    std::fs::read_to_string(path).unwrap()
}

const GOLDEN: &[(&str, &str, &str, i32)] = &[
    ("chi_gram_a2", "chi-gram", "a2.json", 0),
    ("numk_a3", "numk", "a3.json", 0),
    ("numk_degenerate", "numk", "degenerate_lattice.json", 0),
    ("quotient_a2", "quotient", "a2_triple.json", 0),
    ("quotient_empty", "quotient", "empty_triple.json", 0),
    ("verify_sequence_a2", "verify-sequence", "a2_triple.json", 0),
    ("verify_sequence_corollary", "verify-sequence", "corollary_triple.json", 0),
    ("verify_sequence_torsion", "verify-sequence", "torsion_triple.json", 1),
    ("verify_serre_a2", "verify-serre", "a2.json", 0),
    ("verify_serre_degenerate", "verify-serre", "degenerate_lattice.json", 0),
    ("snf", "snf", "snf_matrix.json", 0),
];

#[test]
fn reports_match_golden_files() {
    for (name, command, input, code) in GOLDEN {
        let out = dgk(&[command, "--input", input]).code(*code).get_output().stdout.clone();
        assert_eq!(String::from_utf8(out).unwrap(), golden(name), "{name}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for (_, command, input, _) in GOLDEN {
        let first = dgk(&[command, "--input", input]).get_output().stdout.clone();
        let second = dgk(&[command, "--input", input]).get_output().stdout.clone();
        assert_eq!(first, second);
        let first = dgk(&[command, "--input", input, "--json"]).get_output().stdout.clone();
        let second = dgk(&[command, "--input", input, "--json"]).get_output().stdout.clone();
        assert_eq!(first, second);
    }
}

#[test]
fn json_sidecar() {
    let out = dgk(&["verify-sequence", "--input", "a2_triple.json", "--json"]).success().get_output().stdout.clone();
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["numerical_sequence"]["groups"], serde_json::json!(["Z", "Z^2", "Z"]));
    let out = dgk(&["chi-gram", "--input", "a2.json", "--json"]).success().get_output().stdout.clone();
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["gram"], serde_json::json!([["1", "1"], ["0", "1"]]));
}

#[test]
fn failures_print_an_error_line() {
    let stderr = |a: assert_cmd::assert::Assert| String::from_utf8(a.get_output().stderr.clone()).unwrap();
    let e = stderr(dgk(&["verify-sequence", "--input", "torsion_triple.json"]).code(1));
    assert!(e.starts_with("ERROR: verification failed"), "{e}");
    let e = stderr(dgk(&["chi-gram", "--input", "square_not_zero.json"]).code(2));
    assert!(e.starts_with("ERROR: DG axiom violated: d² = 0 at (id)"), "{e}");
    let e = stderr(dgk(&["chi-gram", "--input", "missing.json"]).code(2));
    assert!(e.starts_with("ERROR: "), "{e}");
    let e = stderr(dgk(&["quotient", "--input", "a2_triple.json", "--depth", "1"]).code(2));
    assert!(e.contains("depth must be at least 2"), "{e}");
    let e = stderr(dgk(&["verify-serre", "--input", "a3.json", "--generators", "1,1"]).code(2));
    assert!(e.contains("not unimodular"), "{e}");
    let e = stderr(dgk(&["chi-gram", "--input", "a2.json", "--generators", "z"]).code(2));
    assert!(e.contains("unknown object"), "{e}");
}

#[test]
fn options() {
    let out = dgk(&["chi-gram", "--input", "a2.json", "--generators", "x,x[1]"]).success().get_output().stdout.clone();
    assert!(String::from_utf8(out).unwrap().ends_with("gram:\n[ 1 -1]\n[-1  1]\n"));
    let out = dgk(&["chi-gram", "--input", "a2.json", "--field", "Fp:3"]).success().get_output().stdout.clone();
    assert!(String::from_utf8(out).unwrap().contains("field: Fp:3"));
    dgk(&["chi-gram", "--input", "a2.json", "--field", "Fp:4"]).code(2);
    dgk(&["numk", "--input", "a2.json"]).success();
    dgk(&["verify-sequence", "--input", "corollary_lattice_triple.json"]).success();
    dgk(&["fuzz", "--seed", "11", "--cases", "20"]).success();
    let deeper = dgk(&["quotient", "--input", "a2_triple.json", "--depth", "5"]).success().get_output().stdout.clone();
    assert!(String::from_utf8(deeper).unwrap().contains("degrees >= -4"));
}
