use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tdpf::hamiltonian::ingest::model_from_value;
use tdpf::{linalg, models, Error};
use tdpf_cli::{exit, exit_code_for, run, Experiment, Options};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tdpf"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_vec_pretty(v).unwrap()).unwrap();
    p
}

fn two_qubit_model() -> Value {
    json!({
        "model": "nn-chain", "N": 2,
        "bond": [["X", "X", 1.0], ["Z", "Z", 0.5]],
        "coupling": {"kind": "trig", "amp": 1.0, "omega": 1.1},
        "field": {"pauli": "X", "curve": {"kind": "constant", "value": 0.4}}
    })
}

fn three_qubit_model() -> Value {
    let mut m = two_qubit_model();
    m["N"] = json!(3);
    m
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

#[test]
fn shipped_driven_chain_matches_builder() {
    let cfg = read_json(&configs().join("order-scan-n3.json"));
    let h = model_from_value(&cfg["model"]).unwrap();
    let reference = models::driven_chain(3, 6).unwrap();
    for tau in [0.0, 0.3, 1.7] {
        for g in 0..2 {
            let d = h.term(g).eval(tau, 1).unwrap() - reference.term(g).eval(tau, 1).unwrap();
            assert!(linalg::spectral_norm(&d).unwrap() < 1e-14);
        }
    }
}

#[test]
fn order_scan_writes_csv_summary_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "scan.json",
        &json!({"model": two_qubit_model(), "orders": [2], "times": {"min": 0.01, "max": 0.05, "points": 6}}),
    );
    let out = dir.path().join("out");
    let status = bin().args(["order-scan", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap().status;
    assert_eq!(status.code(), Some(exit::OK));
    let csv = std::fs::read_to_string(out.join("order_scan.csv")).unwrap();
    assert!(csv.starts_with("family,p,t,error,bound,bound_kind\n"));
    assert_eq!(csv.lines().count(), 7);
    let summary = read_json(&out.join("summary.json"));
    let slope = summary["fits"][0]["slope"].as_f64().unwrap();
    assert!((slope - 3.0).abs() < 0.15, "{slope}");
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["subcommand"], "order-scan");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["oracle_tol"], 1e-12);
    assert!(manifest.get("timestamp").is_none());
}

#[test]
fn missing_model_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", &json!({"orders": [1], "times": [0.1]}));
    let o = bin().args(["bound-check", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(exit::SCHEMA));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("missing field `model`"), "{err}");
}

#[test]
fn unknown_fields_and_bad_grids_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write_config(dir.path(), "typo.json", &json!({"model": two_qubit_model(), "times": [0.1], "order": [1]}));
    let opts = Options { config: typo, out: dir.path().join("o"), workers: Some(1), oracle_tol: None };
    let e = run(Experiment::OrderScan, &opts).unwrap_err();
    assert!(matches!(e, Error::Schema(_)), "{e}");
    let grid = write_config(
        dir.path(),
        "grid.json",
        &json!({"model": two_qubit_model(), "orders": [1], "times": {"min": 0.1, "max": 0.01, "points": 3}}),
    );
    let e = run(Experiment::OrderScan, &Options { config: grid, ..opts }).unwrap_err();
    assert_eq!(exit_code_for(&e), exit::SCHEMA);
}

#[test]
fn floquet_check_reports_every_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f");
    let opts = Options { config: configs().join("floquet-check-n1.json"), out: out.clone(), workers: None, oracle_tol: None };
    let outcome = run(Experiment::FloquetCheck, &opts).unwrap();
    assert_eq!(outcome.exit_code(), exit::OK);
    let csv = std::fs::read_to_string(out.join("floquet_check.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "L,L_keep,evolution_dev,pf_dev,suzuki_dev,error_identity_dev,symmetry_dev,instantaneous_dev");
    let ls: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ls, ["4", "8", "16", "24"]);
    assert!(outcome.summary["final_worst"].as_f64().unwrap() < 1e-6);
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bc.json",
        &json!({"model": three_qubit_model(), "orders": [1, 2], "families": ["exact-segment", "instantaneous"],
                "times": {"min": 0.01, "max": 0.1, "points": 4}}),
    );
    let mut outs = Vec::new();
    for w in ["1", "3"] {
        let out = dir.path().join(format!("w{w}"));
        let status = bin()
            .args(["bound-check", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .env("TDPF_WORKERS", w)
            .output()
            .unwrap()
            .status;
        assert_eq!(status.code(), Some(exit::OK));
        outs.push(std::fs::read(out.join("bound_check.csv")).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    let text = String::from_utf8(outs.remove(0)).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",ok")), "{text}");
}

#[test]
fn oracle_tolerance_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "h.json",
        &json!({"model": three_qubit_model(), "times": [0.05, 0.1], "oracle_tol": 1e-10}),
    );
    let out = dir.path().join("h");
    let status = bin()
        .args(["huyghebaert-check", "--oracle-tol", "1e-12", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(exit::OK));
    assert_eq!(read_json(&out.join("manifest.json"))["oracle_tol"], 1e-12);
}

#[test]
fn mpf_scan_entirely_out_of_regime_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.json", &json!({"model": two_qubit_model(), "J": [2], "times": [3.0, 4.0]}));
    let o = bin().args(["mpf-scan", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("m")).output().unwrap();
    assert_eq!(o.status.code(), Some(exit::OUT_OF_REGIME), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn resource_table_columns_and_mpf_rows() {
    let dir = tempfile::tempdir().unwrap();
    let models: Vec<Value> = [2, 3]
        .into_iter()
        .map(|n| {
            let mut m = two_qubit_model();
            m["N"] = json!(n);
            m["derivative_budget"] = json!(8);
            m
        })
        .collect();
    let cfg = write_config(
        dir.path(),
        "r.json",
        &json!({"models": models, "t": 0.2, "eps": [1e-3], "p": 2, "bound": "measured-alpha", "mpf": true}),
    );
    let out = dir.path().join("r");
    let outcome = run(Experiment::ResourceTable, &Options { config: cfg, out: out.clone(), workers: None, oracle_tol: None })
        .unwrap();
    let csv = std::fs::read_to_string(out.join("resource_table.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "model,N,t,eps,p,r,gates,J,queries,ancillas,bound_kind");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("nn-chain,2,0.2,0.001,2,") && rows[0].ends_with(",,,,measured-alpha"));
    assert!(rows[3].ends_with(",mpf"));
    assert_eq!(outcome.summary["table_form"], "N t (N t/ε)^{1/p}");
}

#[test]
fn nonunitary_check_bounds_scaled_model() {
    let dir = tempfile::tempdir().unwrap();
    let mut model = three_qubit_model();
    model["scale"] = json!([1.0, -0.1]);
    let cfg = write_config(dir.path(), "n.json", &json!({"model": model, "orders": [1, 2], "times": [0.05, 0.2]}));
    let outcome =
        run(Experiment::NonunitaryCheck, &Options { config: cfg, out: dir.path().join("n"), workers: None, oracle_tol: None })
            .unwrap();
    assert_eq!(outcome.violations, 0);
    assert_eq!(outcome.summary["hermitian"], false);
}

#[test]
fn error_classes_map_to_exit_codes() {
    assert_eq!(exit_code_for(&Error::Schema("x".into())), exit::SCHEMA);
    assert_eq!(exit_code_for(&Error::invalid("x")), exit::SCHEMA);
    assert_eq!(exit_code_for(&Error::Convergence { what: "x".into(), disagreement: 1.0 }), exit::CONVERGENCE);
    assert_eq!(exit_code_for(&Error::Window("x".into())), exit::CONVERGENCE);
    assert_eq!(exit_code_for(&Error::OutOfRegime("x".into())), exit::OUT_OF_REGIME);
}

#[test]
fn every_subcommand_name_round_trips() {
    for e in Experiment::ALL {
        assert_eq!(Experiment::from_name(e.name()), Some(e));
        let o = bin().args([e.name(), "--help"]).output().unwrap();
        assert!(o.status.success());
    }
}
