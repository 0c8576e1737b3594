use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    json: Value,
    stdout: String,
}

fn qaut(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_qaut")).args(args).output().expect("spawn qaut");
    let stdout = String::from_utf8(out.stdout).expect("utf8");
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    Run { code: out.status.code().expect("exit code"), json, stdout }
}

fn corpus() -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fixtures");
    let run = qaut(&["corpus", "--out", out.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    (dir, out)
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(format!("{name}.json")).display().to_string()
}

#[test]
fn check_identity() {
    let (_t, dir) = corpus();
    let run = qaut(&["check", &p(&dir, "I2")]);
    assert_eq!(run.code, 0);
    assert_eq!(run.json["homogeneous"], true);
    assert_eq!(run.json["normalized"], true);
    assert_eq!(run.json["positive"], true);
}

#[test]
fn check_sum_block_not_normalized() {
    let (_t, dir) = corpus();
    let run = qaut(&["check", &p(&dir, "2+I2")]);
    assert_eq!(run.json["normalized"], false);
    assert_eq!(run.json["xi_squared"], "5/4");
}

#[test]
fn confluence_outcomes() {
    let (_t, dir) = corpus();
    let i2 = p(&dir, "I2");
    let ok = qaut(&["confluence", &i2, &i2]);
    assert_eq!(ok.code, 0);
    assert_eq!(ok.json["status"], "Resolved");

    let c4 = p(&dir, "C4");
    let bad = qaut(&["confluence", &c4, &c4, "--extended"]);
    assert_eq!(bad.code, 1);
    assert_eq!(bad.json["status"], "Failed");
    assert!(!bad.json["witnesses"].as_array().unwrap().is_empty());

    let strict = qaut(&["confluence", &c4, &c4]);
    assert_eq!(strict.code, 1);
    assert_eq!(strict.json["status"], "Rejected");
}

#[test]
fn hilbert_default_degree() {
    let (_t, dir) = corpus();
    let i2 = p(&dir, "I2");
    let run = qaut(&["hilbert", &i2, &i2]);
    assert_eq!(run.code, 0);
    assert_eq!(run.json["counts"], serde_json::json!(["1", "9", "25", "49"]));
    let fq = p(&dir, "Fq2");
    let run = qaut(&["hilbert", &fq, &fq, "--max-deg", "2"]);
    assert_eq!(run.json["counts"], serde_json::json!(["1", "9", "25"]));
}

#[test]
fn present_counts() {
    let (_t, dir) = corpus();
    let i2 = p(&dir, "I2");
    let run = qaut(&["present", &i2, &i2]);
    assert_eq!(run.code, 0);
    assert_eq!(run.json["generators"], 16);
    assert_eq!(run.json["relations_per_family"], serde_json::json!([64, 4, 4, 64]));
}

#[test]
fn qparam_values() {
    let (_t, dir) = corpus();
    let run = qaut(&["qparam", &p(&dir, "Fq2")]);
    assert_eq!(run.code, 0);
    assert_eq!(run.json["deformation"]["q"], serde_json::json!(["2", "1/2"]));
}

#[test]
fn fusion_products() {
    let run = qaut(&["fusion", "W2*W3"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.json["value"], "W1 + W2 + W3 + W4 + W5");
    assert_eq!(run.json["result"]["dim_total"], 35);
    let run = qaut(&["fusion", "W1V1*W1", "--regime", "even:N1=3"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.json["status"], "not_determined");
    assert_eq!(qaut(&["fusion", "Q1"]).code, 2);
}

#[test]
fn quaternion_relations_and_fold() {
    let (_t, dir) = corpus();
    let q = p(&dir, "quaternion");
    let run = qaut(&["verify-relations", &q]);
    assert_eq!(run.code, 0);
    assert_eq!(run.json["relations"]["tau"], "3");
    let fold = qaut(&["fold", &q]);
    assert_eq!(fold.code, 0);
    assert_eq!(fold.json["algebra"]["dim"], 4);
    assert_eq!(fold.json["center_dim"], 1);
    assert_eq!(fold.json["homogeneity"]["c"], "4");
    assert_eq!(fold.json["measure_positive"], true);
}

#[test]
fn scaled_c_fails_verification() {
    let (t, dir) = corpus();
    let text = fs::read_to_string(p(&dir, "quaternion")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    for x in v["C"].as_array_mut().unwrap().iter_mut().flat_map(|m| m.as_array_mut().unwrap()) {
        for c in x.as_array_mut().unwrap() {
            let n: i64 = c.as_str().unwrap().parse().unwrap();
            *c = Value::String((2 * n).to_string());
        }
    }
    v.as_object_mut().unwrap().remove("D");
    let path = t.path().join("scaled.json");
    fs::write(&path, v.to_string()).unwrap();
    let run = qaut(&["verify-relations", path.to_str().unwrap()]);
    assert_eq!(run.code, 1);
    let fold = qaut(&["fold", path.to_str().unwrap()]);
    assert_eq!(fold.code, 1);
    assert_eq!(fold.json["associativity"]["status"], "fails");
}

#[test]
fn certify_and_hopf() {
    let (_t, dir) = corpus();
    let i2 = p(&dir, "I2");
    let ok = qaut(&["certify-nonzero", &i2, &i2]);
    assert_eq!(ok.code, 0, "{}", ok.stdout);
    assert_eq!(ok.json["status"], "certificate");
    let bad = qaut(&["certify-nonzero", &i2, &p(&dir, "Fq2")]);
    assert_eq!(bad.code, 1);
    let hopf = qaut(&["hopf-axioms", &i2, &i2, &i2, &i2]);
    assert_eq!(hopf.code, 0);
    assert_eq!(hopf.json["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn parse_error_names_file_line_token() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"blocks\": [[[1, \"2/x\"], [0, 1]]]\n}\n").unwrap();
    let run = qaut(&["check", path.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert_eq!(run.json["error"], "parse");
    assert_eq!(run.json["line"], 2);
    assert_eq!(run.json["token"], "2/x");
    assert!(run.json["file"].as_str().unwrap().ends_with("bad.json"));

    fs::write(&path, "{\"blocks\": [[[1, 0], [0, 1]]\n").unwrap();
    let run = qaut(&["check", path.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert_eq!(run.json["error"], "parse");
}

#[test]
fn malformed_input_never_exits_one() {
    let dir = TempDir::new().unwrap();
    let singular = dir.path().join("singular.json");
    fs::write(&singular, r#"{"blocks": [[[1, 1], [1, 1]]]}"#).unwrap();
    assert_eq!(qaut(&["check", singular.to_str().unwrap()]).code, 2);
    assert_eq!(qaut(&["check", "/nonexistent/E.json"]).code, 2);
    assert_eq!(qaut(&["no-such-command"]).code, 2);
    assert_eq!(qaut(&["hilbert"]).code, 2);
}

#[test]
fn output_is_byte_stable() {
    let (_t, dir) = corpus();
    let i2 = p(&dir, "I2");
    let a = qaut(&["confluence", &i2, &i2]).stdout;
    let b = qaut(&["confluence", &i2, &i2]).stdout;
    assert_eq!(a, b);
    let (_u, again) = corpus();
    for name in ["I2", "Fq2", "quaternion", "C4"] {
        assert_eq!(fs::read(p(&dir, name)).unwrap(), fs::read(p(&again, name)).unwrap());
    }
}
