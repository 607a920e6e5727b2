use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn entspread(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entspread")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = entspread(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn close(v: &Value, want: f64, tol: f64) -> bool {
    v.as_f64().is_some_and(|x| (x - want).abs() <= tol)
}

fn json_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn analyze_partial_state() {
    let v = json(&["analyze", "--state", "partial:0.25"]);
    assert_eq!(v["subcommand"], "analyze");
    assert_eq!(v["parameters"]["state"], "partial:0.25");
    let p = &v["payload"];
    assert!(close(&p["spread"], 0.584963, 1e-6));
    assert!(close(&p["entropies"]["1"], 0.811278, 1e-6));
    assert!(close(&p["entropies"]["0"], 1.0, 0.0));
}

#[test]
fn analyze_with_target_and_product() {
    let v = json(&["analyze", "--state", "ebits:3", "--target", "partial:0.25", "--times", "product"]);
    let c = &v["payload"]["conversion"];
    assert!(close(&c["communication_bound"], 0.584963, 1e-6));
    assert!(close(&c["delta"], 0.0, 0.0));
}

#[test]
fn analyze_state_file() {
    let f = json_file(r#"{"dA": 2, "dB": 2, "amps_re": [0.8660254037844386, 0, 0, 0.5]}"#);
    let v = json(&["analyze", "--state", f.path().to_str().unwrap()]);
    assert!(close(&v["payload"]["spread"], 0.584963, 1e-6));
    let s = json_file(r#"{"classes": [{"value": 0.25, "mult": 4}]}"#);
    let v = json(&["analyze", "--state", s.path().to_str().unwrap()]);
    assert!(close(&v["payload"]["spread"], 0.0, 1e-12));
}

#[test]
fn generalized_spread_with_infinity() {
    let v = json(&["analyze", "--state", "partial:0.1", "--alpha", "0", "--beta", "inf"]);
    assert_eq!(v["payload"]["generalized_spread"], v["payload"]["spread"]);
}

#[test]
fn smooth_csv() {
    let out = entspread(&["smooth", "--state", "partial:0.25", "--eps", "0,0.25", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "eps,smoothed_spread\n0.0,0.584963\n0.25,-0.415037\n");
    let exhaustive = json(&["smooth", "--state", "partial:0.25", "--eps", "0.25", "--exhaustive"]);
    assert!(close(&exhaustive["payload"]["rows"][0]["smoothed_spread"], -0.415037, 1e-6));
}

#[test]
fn power_rows() {
    let v = json(&["power", "--state", "partial:0.1", "--n", "16,64"]);
    let rows = v["payload"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["num_classes"], 65);
    assert!(close(&rows[0]["sqrt_n"], 4.0, 0.0));
}

#[test]
fn dilution_curve_columns() {
    let out = entspread(&["dilution-curve", "--p", "0.1", "--eps", "0.01", "--n", "256,1024", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,sqrt_n,ebits,bound\n256,16.0,"), "{text}");
}

#[test]
fn capacity_table_rows() {
    let v = json(&["capacity-table"]);
    let rows = v["payload"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0]["resource"], "qubit");
    let v = json(&["capacity-table", "--resource", "ebit", "--resource", "embezzler:16,0.01"]);
    assert!(close(&v["payload"]["rows"][1]["max"], 0.16, 1e-9));
}

#[test]
fn embezzle_rows() {
    let v = json(&["embezzle", "--n", "4,8", "--state", "ebits:1"]);
    let rows = v["payload"]["rows"].as_array().unwrap();
    let f = |i: usize| rows[i]["fidelity"].as_f64().unwrap();
    assert!(f(1) >= f(0));
    assert!(close(&rows[0]["error"], 1.0 - f(0), 1e-6));
}

#[test]
fn entangling_power_cnot() {
    let v = json(&["entangling-power", "--gate", "cnot", "--restarts", "4"]);
    let p = &v["payload"];
    assert!(close(&p["E_U"], 1.0, 1e-2));
    assert!(close(&p["E_U_dagger"], 1.0, 1e-2));
    assert!(close(&p["log2_operator_schmidt_rank"], 1.0, 1e-9));
}

#[test]
fn entangling_power_gate_file() {
    let f = json_file(r#"{"dA": 2, "dB": 2, "re": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,-1]]}"#);
    let v = json(&["entangling-power", "--gate", f.path().to_str().unwrap(), "--restarts", "4"]);
    assert!(close(&v["payload"]["E_U"], 1.0, 1e-2));
}

#[test]
fn uf_and_table() {
    let v = json(&["uf", "--function", "and", "--restarts", "4"]);
    let p = &v["payload"];
    assert_eq!(p["operator_schmidt_rank"], 2);
    assert_eq!(p["self_inverse"], true);
    assert!(close(&p["entangling_power"], 1.0, 1e-2));
    let t = json(&["uf", "--table", "1,0;0,1", "--restarts", "0"]);
    assert_eq!(t["payload"]["diagonal"], serde_json::json!([-1, 1, 1, -1]));
    assert!(t["payload"].get("entangling_power").is_none());
}

#[test]
fn qrst_dephasing() {
    let v = json(&["qrst", "--channel", "dephasing:1", "--c1", "0.5", "--c2", "0", "--e", "1"]);
    let p = &v["payload"];
    assert_eq!(p["feasible"], false);
    assert!(close(&p["slacks"]["forward"], -0.5, 0.02));
    assert!(close(&p["rates_at_maximally_mixed"]["I_AB"], 1.0, 1e-9));
}

#[test]
fn qrst_channel_file() {
    let f = json_file(r#"{"kraus_re": [[[1,0],[0,0]], [[0,0],[0,1]]]}"#);
    let v = json(&["qrst", "--channel", f.path().to_str().unwrap(), "--c1", "1", "--c2", "0", "--e", "1"]);
    assert_eq!(v["payload"]["feasible"], true);
}

#[test]
fn superpose_program_file() {
    let program = r#"{
        "input": [{"label": "phi", "shared": "phi"}],
        "branches": [[{"op": "destroy_ebit_via_cbit"}], [{"op": "noop_random_bit"}]],
        "amplitudes_re": [0.7071067811865476, 0.7071067811865476]
    }"#;
    let f = json_file(program);
    let v = json(&["superpose-demo", "--program", f.path().to_str().unwrap()]);
    assert!(close(&v["payload"]["fidelity"], 1.0, 1e-9));
    let clean = json(&["superpose-demo", "--clean"]);
    assert_eq!(v["payload"], clean["payload"]);
}

#[test]
fn concentrate_samples() {
    let v = json(&["concentrate", "--p", "0.2", "--n", "200", "--trials", "50", "--samples"]);
    let p = &v["payload"];
    assert_eq!(p["rows"].as_array().unwrap().len(), 50);
    assert!(close(&p["binary_entropy"], 0.721928, 1e-6));
    let csv = entspread(&["concentrate", "--p", "0.2", "--n", "200", "--trials", "3", "--samples", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap().lines().count(), 4);
}

#[test]
fn same_seed_same_output() {
    let args = ["concentrate", "--p", "0.3", "--n", "500", "--trials", "200", "--seed", "9"];
    assert_eq!(entspread(&args).stdout, entspread(&args).stdout);
    let other = entspread(&["concentrate", "--p", "0.3", "--n", "500", "--trials", "200", "--seed", "10"]);
    assert_ne!(entspread(&args).stdout, other.stdout);
}

#[test]
fn precision_controls_digits() {
    let v = json(&["analyze", "--state", "partial:0.25", "--precision", "3"]);
    assert_eq!(v["payload"]["spread"].as_f64(), Some(0.585));
}

#[test]
fn domain_errors_exit_one() {
    for args in [
        &["analyze", "--state", "partial:1.5"][..],
        &["analyze", "--state", "nonsense"],
        &["smooth", "--state", "partial:0.2", "--eps", "1.0"],
        &["dilution-curve", "--p", "0.1", "--eps", "0.3", "--n", "4"],
        &["qrst", "--channel", "dephasing:2", "--c1", "1", "--c2", "0", "--e", "1"],
        &["analyze", "--state", "/nonexistent/state.json"],
    ] {
        let out = entspread(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &[][..],
        &["analyze"],
        &["frobnicate"],
        &["uf"],
        &["superpose-demo", "--clean", "--dirty"],
        &["analyze", "--state", "product", "--format", "csv"],
        &["analyze", "--state", "product", "--alpha", "2"],
    ] {
        let out = entspread(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    let out = entspread(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("dilution-curve"));
}
