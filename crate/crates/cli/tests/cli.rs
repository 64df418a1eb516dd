use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fanforms"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn fan_reports_predicates() {
    let v = json_of(&run(&["fan", "--weights", "1,1,2"]));
    assert_eq!(v["smooth"], false);
    assert_eq!(v["complete_simplicial"], true);
    assert_eq!(v["divisive"], true);
    assert_eq!(v["fan"]["rays"], serde_json::json!([[-1, -2], [1, 0], [0, 1]]));

    let v = json_of(&run(&["fan", "--weights", "1,1"]));
    assert_eq!(v["smooth"], true);
    assert_eq!(v["fan"], json_of(&run(&["fan", "--projective", "1"]))["fan"]);
}

#[test]
fn non_divisive_weights_are_rejected() {
    let out = run(&["fan", "--weights", "1,2,3"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("not divisive"));
    assert!(out.stdout.is_empty());
}

#[test]
fn conflicting_fan_arguments_are_malformed() {
    let out = run(&["fan", "--weights", "1,1", "--projective", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn basis_and_betti() {
    let v = json_of(&run(&["basis", "--projective", "2", "--max-degree", "8"]));
    assert_eq!(v["ranks"], serde_json::json!([1, 3, 6, 9, 12]));
    let v = json_of(&run(&["betti", "--weights", "1,1,2"]));
    assert_eq!(v["ranks"], serde_json::json!([1, 1, 1]));
}

#[test]
fn hilbert_agrees_with_face_ring() {
    let v = json_of(&run(&["hilbert", "--theory", "HQ", "--weights", "1,1,2", "--max-degree", "8"]));
    assert_eq!(v["agree"], true);
    assert_eq!(v["piecewise"], v["face_ring"]);
}

#[test]
fn validate_fixtures() {
    for name in ["p.json", "q.json", "epsilon.json", "zeta.json"] {
        let v = json_of(&run(&["validate", fixture(name).to_str().unwrap()]));
        assert_eq!(v["valid"], true, "{name}");
        assert_eq!(v["kind"], "piecewise");
    }
}

#[test]
fn invalid_element_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"theory":"H","fan":{"weights":[1,1,2]},"components":{"1,2":"0","0,2":"x1","0,1":"x2"}}"#,
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], false);
    assert!(!v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_json_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"theory\": ").unwrap();
    assert_eq!(run(&["validate", path.to_str().unwrap()]).status.code(), Some(3));
    std::fs::write(&path, r#"{"theory":"H","fan":{"projective":2},"components":{"1,2":"x1 +* 2"}}"#).unwrap();
    assert_eq!(run(&["validate", path.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn arithmetic() {
    let p = fixture("p.json");
    let p = p.to_str().unwrap();
    let sq = json_of(&run(&["arith", "--op", "mul", p, p]));
    let pw = json_of(&run(&["arith", "--op", "pow", "--exponent", "2", p]));
    assert_eq!(sq, pw);
    assert_eq!(sq["components"]["0,2"], "4*x1^2");
    let zero = json_of(&run(&["arith", "--op", "sub", p, p]));
    assert!(zero["components"].as_object().unwrap().values().all(|c| c == "0"));
    let aug = json_of(&run(&["arith", "--op", "augmentation", p]));
    assert_eq!(aug["augmentation"], "0");
}

#[test]
fn gkm_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let eps = fixture("epsilon.json");
    let out = run(&[
        "gkm",
        "from-piecewise",
        eps.to_str().unwrap(),
        "--weights",
        "1,1,2",
        "--output",
        g.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let tuple: Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(tuple["entries"], serde_json::json!(["-a2 + 1", "-a1^2 + 1", "0"]));
    assert_eq!(json_of(&run(&["validate", g.to_str().unwrap()]))["valid"], true);

    let back = json_of(&run(&["gkm", "to-piecewise", g.to_str().unwrap()]));
    let again = dir.path().join("back.json");
    std::fs::write(&again, serde_json::to_string(&back).unwrap()).unwrap();
    let v = json_of(&run(&["arith", "--op", "sub", again.to_str().unwrap(), eps.to_str().unwrap()]));
    assert!(v["components"].as_object().unwrap().values().all(|c| c == "0"));
}

#[test]
fn gkm_euler_and_generators() {
    let v = json_of(&run(&["gkm", "euler", "--weights", "1,1,2", "--i", "2", "--j", "0"]));
    assert_eq!(v["euler_class"], "-a2 + 1");
    let v = json_of(&run(&["gkm", "generators", "--weights", "1,1,2"]));
    assert_eq!(v.as_array().unwrap().len(), 3);
    let out = run(&["gkm", "euler", "--weights", "1,1,2", "--i", "0", "--j", "0"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["gkm", "generators", "--weights", "1,1", "--theory", "HQ"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn facering_commands() {
    let v = json_of(&run(&["facering", "nonfaces", "--weights", "1,1,2"]));
    assert_eq!(v["nonfaces"], serde_json::json!([[0, 1, 2]]));
    let v = json_of(&run(&["facering", "hilbert", "--projective", "1", "--max-degree", "4"]));
    assert_eq!(v["face_ring"], serde_json::json!([1, 2, 2]));
    let v = json_of(&run(&["facering", "evaluate", "--projective", "2", "--element", "y1"]));
    assert_eq!(v["components"]["1,2"], "x1");
    assert_eq!(v["components"]["0,1"], "x1 - x2");
    assert_eq!(v["components"]["0,2"], "0");
}

#[test]
fn xi_star_needs_smooth_fan() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("y.json");
    std::fs::write(
        &path,
        r#"{"theory":"H","fan":{"projective":2},"components":{"1,2":"x1","0,2":"0","0,1":"x1 - x2"}}"#,
    )
    .unwrap();
    let v = json_of(&run(&["facering", "xi-star", path.to_str().unwrap()]));
    assert_eq!(v["representative"], "y1");
    assert_eq!(v["verified"], true);

    let out = run(&["facering", "xi-star", fixture("epsilon.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn completion_then_chern() {
    let eps = fixture("epsilon.json");
    let v = json_of(&run(&["transform", "--kind", "cc", eps.to_str().unwrap(), "--trunc-order", "3"]));
    assert_eq!(v["theory"], "HR");
    assert_eq!(v["components"]["0,1"], "-1/6*x2^3*z^3 - 1/2*x2^2*z^2 - x2*z");
    let out = run(&["transform", "--kind", "cc", eps.to_str().unwrap(), "--trunc-order", "0"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verify_paper_passes() {
    let out = run(&["verify-paper"]);
    let v = json_of(&out);
    assert_eq!(v["passed"], true);
    assert!(v["items"].as_array().unwrap().len() > 20);
    let out = run(&["verify-paper", "--trunc-order", "2", "--quiet"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn verify_paper_names_corrupted_fixture() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["q.json", "epsilon.json", "zeta.json"] {
        std::fs::copy(fixture(name), dir.path().join(name)).unwrap();
    }
    std::fs::write(
        dir.path().join("p.json"),
        r#"{"theory":"H","fan":{"weights":[1,1,2]},"components":{"1,2":"0","0,2":"2*x1","0,1":"x2 + x1"}}"#,
    )
    .unwrap();
    let out = run(&["verify-paper", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<&str> = v["items"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|i| i["passed"] == false)
        .map(|i| i["id"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["1.p-compatible"]);
    assert!(stderr(&out).contains("1.p-compatible"));
}

#[test]
fn output_is_deterministic() {
    let args = ["gkm", "generators", "--weights", "1,1,2,6"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["fan", "--weights", "1,1,2"]);
    let b = run(&["fan", "--weights", "1,1,2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn module_expressions_in_generators() {
    let eps = fixture("epsilon.json");
    let eps = eps.to_str().unwrap();
    let v = json_of(&run(&["gkm", "express", eps, "--weights", "1,1,2"]));
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 3);
    let out = run(&["gkm", "express", eps, "--weights", "1,1,2", "--window", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&run(&["gkm", "express", fixture("p.json").to_str().unwrap(), "--weights", "1,1,2"]));
    assert_eq!(v["theory"], "H");
    assert!(v["coefficients"].is_array());
}

#[test]
fn gkm_validate_reports_failing_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(&path, r#"{"theory":"H","chi":[1,1,2],"entries":["0","x1","0"]}"#).unwrap();
    let out = run(&["gkm", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let pairs: Vec<(u64, u64)> = v["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f["i"].as_u64().unwrap(), f["j"].as_u64().unwrap()))
        .collect();
    assert_eq!(pairs, [(1, 0)]);
}
