use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn stratsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratsym")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn homology_duality_passes() {
    for model in ["torus4", "kodaira_thurston"] {
        let out = stratsym(&["homology", "--model", model]);
        assert_eq!(code(&out), 0, "{model}");
        let v = json(&out);
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["pass"], true);
    }
    let v = json(&stratsym(&["homology", "--model", "torus4"]));
    assert_eq!(v["report"]["d"]["ranks"], serde_json::json!([1, 4, 6, 4, 1]));
}

#[test]
fn homology_on_coordinate_chart() {
    let out = stratsym(&["homology", "--model", "r2n(1)", "--total-degree", "3", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("operator,degree,chain_dim,rank\n"));
    assert_eq!(code(&stratsym(&["homology", "--model", "torus4", "--degree", "9"])), 2);
}

#[test]
fn malformed_model_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "schema_version = 1\nname = \"bad\"\n[symplectic]\nomega = 3\n").unwrap();
    let out = stratsym(&["homology", "--model", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(code(&stratsym(&["homology", "--model", "no_such_model"])), 2);
}

#[test]
fn exported_model_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kt.toml");
    let out = stratsym(&["export", "--model", "kodaira_thurston", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let out = stratsym(&["homology", "--model", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["report"]["d"]["ranks"], serde_json::json!([1, 3, 4, 3, 1]));
    let cone = dir.path().join("cone.toml");
    assert_eq!(code(&stratsym(&["export", "--model", "cz2_cone", "--out", cone.to_str().unwrap()])), 0);
    let out = stratsym(&["flow", "--model", cone.to_str().unwrap(), "--t-end", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&stratsym(&["export", "--model", "torus4", "--format", "csv"])), 2);
}

#[test]
fn lefschetz_verdicts() {
    let out = stratsym(&["lefschetz", "--model", "torus4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["report"]["hard_lefschetz"], true);
    assert_eq!(v["report"]["all_classes_harmonic"], true);
    assert_eq!(v["report"]["cavalcanti"]["holds"], true);

    let out = stratsym(&["lefschetz", "--model", "kodaira_thurston"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["report"]["hard_lefschetz"], false);
    assert_eq!(v["report"]["all_classes_harmonic"], false);
    assert_eq!(v["report"]["equivalence_holds"], true);

    assert_eq!(code(&stratsym(&["lefschetz", "--model", "torus4", "--k", "99"])), 2);
    assert_eq!(code(&stratsym(&["lefschetz", "--model", "r2n(1)"])), 2);
    let out = stratsym(&["lefschetz", "--model", "kodaira_thurston", "--k", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["report"]["hard"].as_array().unwrap().len(), 1);
}

#[test]
fn flow_oscillator_conserves() {
    let out = stratsym(&["flow", "--model", "cz2_cone", "--t-end", "20", "--dt", "1e-3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["report"]["conservation"]["h_drift"].as_f64().unwrap() < 1e-9);
    assert!(v["report"]["conservation"]["relation_drifts"][0].as_f64().unwrap() < 1e-9);
    assert_eq!(v["report"]["vector_field"], serde_json::json!(["-4*w", "4*w", "2*u - 2*v"]));

    let out = stratsym(&["flow", "--model", "cz2_cone", "--t-end", "0.01", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,u,v,w,H,relation1,stratum\n"));
    assert_eq!(text.lines().count(), 12);

    let out = stratsym(&["flow", "--model", "cz2_cone", "--initial", "0,0,0", "--hamiltonian", "u*v"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["report"]["final_stratum"], "apex");

    assert_eq!(code(&stratsym(&["flow", "--model", "cz2_cone", "--dt", "0"])), 2);
    assert_eq!(code(&stratsym(&["flow", "--model", "cz2_cone", "--initial", "1,1,0"])), 2);
    assert_eq!(code(&stratsym(&["flow", "--model", "torus4"])), 2);
}

#[test]
fn partition_of_unity_and_gap() {
    let out = stratsym(&["pou"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["report"]["max_sum_error"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["report"]["values"].as_array().unwrap().len(), 1000);
    let out = stratsym(&["pou", "--epsilon", "1/2"]);
    assert_eq!(code(&out), 1);
    assert!(json(&out)["report"]["gap"].is_string());
    assert_eq!(code(&stratsym(&["pou", "--epsilon", "0"])), 2);
}

#[test]
fn membership_reports() {
    let out = stratsym(&["membership", "--poly", "y1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["report"]["entries"][0]["verdict"], "not a member");
    let out = stratsym(&["membership", "--poly", "x1*y1 + z1"]);
    assert_eq!(json(&out)["report"]["entries"][0]["certificate"]["base_part"], "z1");
    assert_eq!(code(&stratsym(&["membership", "--dims", "2,3,1"])), 2);
    assert_eq!(code(&stratsym(&["membership", "--poly", "q"])), 2);
}

#[test]
fn reports_are_reproducible() {
    for args in [
        vec!["membership", "--seed", "17", "--samples", "20"],
        vec!["pou", "--points", "50"],
        vec!["homology", "--model", "kodaira_thurston"],
    ] {
        let a = stratsym(&args);
        let b = stratsym(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = stratsym(&["membership", "--seed", "17"]);
    let b = stratsym(&["membership", "--seed", "18"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn thread_count_from_env_and_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_stratsym"))
        .env("STRATSYM_THREADS", "2")
        .args(["homology", "--model", "torus4"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(code(&stratsym(&["homology", "--model", "torus4", "--threads", "0"])), 2);
}

#[test]
fn list_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("list.json");
    assert_eq!(code(&stratsym(&["list", "--out", path.to_str().unwrap()])), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["report"].as_array().unwrap().len(), 5);
}
