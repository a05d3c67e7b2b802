use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn ppav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppav"))
        .args(args)
        .env_remove("PPAV_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = ppav(&all);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp_json(v: &Value) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{v}").unwrap();
    f
}

fn matrix(v: &Value) -> Vec<f64> {
    v["data"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn a_hat_display() {
    let out = ppav(&["genus", "ahat", "--order", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "-1/24 p1 ; -1/1440 p2 + 7/5760 p1^2");
}

#[test]
fn chern_character_in_degree_two() {
    let v = json(&["genus", "ch", "--rank", "2", "--order", "2"]);
    assert_eq!(v["terms"][2], "-c2 + 1/2 c1^2");
}

#[test]
fn multipliers_for_genus_one() {
    let out = ppav(&["multiplier", "enum", "--g", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().filter(|r| r.ends_with("even")).count(), 3);
    assert_eq!(rows.iter().filter(|r| r.ends_with("odd")).count(), 1);
    let v = json(&["multiplier", "enum", "--g", "2"]);
    assert_eq!(v["count"], 16);
    assert_eq!(v["odd"], 6);
}

#[test]
fn etau_determinant_at_i() {
    let out = ppav(&["hodge", "etau", "--tau", "0+1i"]);
    assert!(out.status.success());
    assert!(
        stdout(&out).lines().any(|l| l == "det(M;N) = 8i"),
        "{}",
        stdout(&out)
    );
    let v = json(&["hodge", "etau", "--tau", "1+1i"]);
    let ratio: Vec<f64> = v["ratio"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(ratio[0].abs() < 1e-12 && (ratio[1] + 3.0).abs() < 1e-12);
    let d = v["wirtinger"]["d_conj_tau"].as_array().unwrap();
    assert!(d[0].as_f64().unwrap().hypot(d[1].as_f64().unwrap()) > 1e-3);
}

#[test]
fn identity_and_standard_form_give_the_standard_structure() {
    let v = json(&["tame", "--identity", "1"]);
    assert_eq!(matrix(&v["j"]), vec![0.0, 1.0, -1.0, 0.0]);
    assert_eq!(v["coherent"], true);
    let z = &v["siegel_point"];
    assert!((matrix(&z["im"])[0] - 1.0).abs() < 1e-12);
}

#[test]
fn siegel_fixture_round_trips() {
    let v = json(&["period", "--tau", "0+2i"]);
    let back = &v["round_trip"];
    assert!((matrix(&back["im"])[0] - 2.0).abs() < 1e-12);
    assert!(matrix(&back["re"])[0].abs() < 1e-12);
    let t = json(&["tame", "--tau", "0+2i"]);
    assert!((matrix(&t["siegel_point"]["im"])[0] - 2.0).abs() < 1e-9);
}

#[test]
fn degenerate_skew_form_exits_with_validation_code() {
    let pair = serde_json::json!({
        "metric": {"kind": "metric", "matrix": {"rows": 2, "cols": 2, "data": [1.0, 0.0, 0.0, 1.0]}},
        "skew": {"kind": "skew", "matrix": {"rows": 2, "cols": 2, "data": [0.0, 0.0, 0.0, 0.0]}},
    });
    let f = temp_json(&pair);
    let out = ppav(&["tame", "--pair", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn malformed_inputs_exit_with_validation_code() {
    let f = temp_json(&serde_json::json!({"metric": 1}));
    assert_eq!(
        ppav(&["tame", "--pair", f.path().to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ppav(&["tame", "--pair", "/nonexistent/pair.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ppav(&["tame", "--identity", "1", "--tol", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ppav(&["multiplier", "char", "--eps", "1,2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        ppav(&["genus", "unimodular", "--fixture", "cp3", "--a", "1,0,0,0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn unreachable_truncation_exits_with_numerical_code() {
    let out = ppav(&["theta", "--tau", "0+0.0001i", "--tol", "1e-14"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn ppav_of_a_principal_pair() {
    let pair = serde_json::json!({
        "metric": {"kind": "metric", "matrix": {"rows": 2, "cols": 2, "data": [2.0, 0.5, 0.5, 1.0]}},
        "skew": {"kind": "skew", "matrix": {"rows": 2, "cols": 2, "data": [0.0, -1.0, 1.0, 0.0]}},
    });
    let f = temp_json(&pair);
    let v = json(&["ppav", "--pair", f.path().to_str().unwrap()]);
    assert_eq!(v["principal"], true);
    assert!(v["siegel_point"]["im"]["data"][0].as_f64().unwrap() > 0.0);
    assert!(v["riemann_form"]["min_on_basis"].as_f64().unwrap() > 0.0);

    let fractional = serde_json::json!({
        "metric": pair["metric"],
        "skew": {"kind": "skew", "matrix": {"rows": 2, "cols": 2, "data": [0.0, -0.5, 0.5, 0.0]}},
    });
    let g = temp_json(&fractional);
    assert_eq!(
        ppav(&["ppav", "--pair", g.path().to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn theta_output_schema() {
    let v = json(&["theta", "--tau", "0+1i"]);
    let value = v["value"].as_array().unwrap();
    let oracle: f64 = (-10i32..=10)
        .map(|n| (-std::f64::consts::PI * f64::from(n * n)).exp())
        .sum();
    assert!((value[0].as_f64().unwrap() - oracle).abs() < 1e-9);
    assert!(v["radius"].as_f64().unwrap() > 0.0);
    assert!(v["terms"].as_u64().unwrap() > 0);
    let odd = json(&["theta", "--tau", "0.3+1.2i", "--char", "1/2:1/2"]);
    assert!(odd["value"][0].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn cp3_fixture_is_unimodular() {
    let v = json(&["genus", "unimodular", "--fixture", "cp3"]);
    assert_eq!(v["unimodular"], true);
    assert_eq!(v["antisymmetric"], true);
    assert_eq!(v["determinant"], "1");
    let p = json(&["genus", "pair", "--fixture", "cp3", "--s", "-2", "--t", "3"]);
    assert_eq!(p["value"], "-20");
}

#[test]
fn ring_model_from_file() {
    let model = serde_json::json!({
        "dimension_param": 2,
        "basis": [{"name": "1", "degree": 0}, {"name": "x", "degree": 2}],
        "mult": [],
        "integrate": [0, 1],
        "lattice": [[1, 0], [1, 1]],
    });
    let f = temp_json(&model);
    let v = json(&["genus", "unimodular", "--model", f.path().to_str().unwrap()]);
    assert_eq!(v["unimodular"], true);
}

#[test]
fn hodge_commands() {
    let w = json(&["hodge", "weil", "--fixture", "curve", "--tau", "0.2+1.3i"]);
    assert_eq!(w["riemann"]["second"], true);
    assert_eq!(w["jacobian"]["principal"], true);
    let e = json(&["hodge", "even", "--fixture", "weight2", "--seed", "4"]);
    assert_eq!(e["q_unimodular"], true);
    let s = json(&["hodge", "even", "--fixture", "weight2", "--scale", "2"]);
    assert_eq!(s["q_unimodular"], false);
    let l = json(&["hodge", "lefschetz", "--g", "2"]);
    let degrees = l["degrees"].as_array().unwrap();
    assert_eq!(degrees.len(), 5);
    assert!(degrees
        .iter()
        .all(|d| d["min_eigenvalue"].as_f64().unwrap() > 0.0));
}

#[test]
fn hodge_structure_from_file() {
    let s = serde_json::json!({
        "weight": 1,
        "dim": 2,
        "pieces": [
            {"p": 1, "q": 0, "basis": {"rows": 2, "cols": 1, "data": [[0.0, 1.0], [1.0, 0.0]]}},
            {"p": 0, "q": 1, "basis": {"rows": 2, "cols": 1, "data": [[0.0, -1.0], [1.0, 0.0]]}},
        ],
        "polarization": {"rows": 2, "cols": 2, "data": [0, 1, -1, 0]},
    });
    // H^{1,0} spanned by (i, 1) has the wrong orientation for this Q.
    let f = temp_json(&s);
    assert_eq!(
        ppav(&["hodge", "weil", "--structure", f.path().to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let mut flipped = s.clone();
    flipped["pieces"][0]["p"] = 0.into();
    flipped["pieces"][0]["q"] = 1.into();
    flipped["pieces"][1]["p"] = 1.into();
    flipped["pieces"][1]["q"] = 0.into();
    let g = temp_json(&flipped);
    let v = json(&["hodge", "weil", "--structure", g.path().to_str().unwrap()]);
    assert_eq!(v["weight"], 1);
    assert_eq!(v["riemann"]["second"], true);
    assert_eq!(v["jacobian"]["principal"], true);
}

#[test]
fn multiplier_round_trips() {
    let v = json(&["multiplier", "char", "--eps", "-1,-1"]);
    assert_eq!(v["characteristic"], "1/2:1/2");
    assert_eq!(v["parity"], "odd");
    let back = json(&["multiplier", "char", "--char", "1/2:1/2"]);
    assert_eq!(back["values"], serde_json::json!([-1, -1]));
    let c = json(&[
        "multiplier",
        "check",
        "--eps",
        "1,-1,-1,1",
        "--samples",
        "100",
    ]);
    assert_eq!(c["cocycle"], true);
}

#[test]
fn output_is_deterministic_and_tolerance_comes_from_the_environment() {
    let a = ppav(&[
        "hodge",
        "lefschetz",
        "--g",
        "3",
        "--seed",
        "9",
        "--format",
        "json",
    ]);
    let b = ppav(&[
        "hodge",
        "lefschetz",
        "--g",
        "3",
        "--seed",
        "9",
        "--format",
        "json",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_ppav"))
        .args(["tame", "--identity", "1"])
        .env("PPAV_TOL", "0.5")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
