use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use qwl_cli::{run, Cli};
use qwl_core::limits::{
    evencyc_protocol, limit_hamiltonian_cycle, repeated_limit, strauch_protocol,
};
use qwl_core::numerics::{kron, CMatrix};
use serde_json::Value;

fn qwl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let mut argv = vec!["qwl"];
    argv.extend_from_slice(args);
    let outcome = run(&Cli::parse_from(argv)).unwrap();
    serde_json::from_str(&outcome.text).unwrap()
}

fn write_matrix(dir: &Path, name: &str, m: &CMatrix) -> String {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|k| [m[(r, k)].re, m[(r, k)].im])
                .collect()
        })
        .collect();
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&rows).unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn info_reports_walk_structure() {
    let r = report(&["info", "--walk", "example"]);
    assert_eq!(r["shift_order"], 2);
    assert_eq!(
        r["adjacency_spectrum"],
        serde_json::json!([[3.0, 1], [-1.0, 3]])
    );
    let r = report(&["info", "--walk", "cycle:8"]);
    assert_eq!(
        (
            r["coin_dim"].as_u64(),
            r["walker_dim"].as_u64(),
            r["shift_order"].as_u64()
        ),
        (Some(2), Some(8), Some(8))
    );
    let r = report(&["info", "--walk", "lattice:3,2"]);
    assert_eq!(
        (r["coin_dim"].as_u64(), r["degree"].as_u64()),
        (Some(4), Some(4))
    );
}

#[test]
fn bad_specs_exit_with_validation_code() {
    for args in [
        vec!["info", "--walk", "cycle:2"],
        vec!["info", "--walk", "torus:3"],
        vec!["converge", "--walk", "example", "--protocol", "strauch"],
        vec![
            "converge",
            "--walk",
            "cycle:6",
            "--protocol",
            "strauch",
            "--m-list",
            "64,32",
        ],
        vec![
            "converge",
            "--walk",
            "cycle:6",
            "--protocol",
            "strauch",
            "--gamma",
            "-1",
        ],
        vec!["project", "--walk", "example"],
        vec!["closure", "--walk", "cycle:4", "--tol", "1e-3"],
        vec!["info", "--walk", "cycle:4", "--format", "csv"],
    ] {
        let out = qwl(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn failed_commands_leave_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qwl(&[
        "closure",
        "--walk",
        "cycle:4",
        "--tol",
        "1e-3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
    let out = qwl(&[
        "closure",
        "--walk",
        "cycle:4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["dimension"], 7);
}

#[test]
fn converge_csv_round_trips() {
    let out = qwl(&["converge", "--walk", "cycle:8", "--protocol", "strauch"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(out.stdout.as_slice());
    assert_eq!(
        reader.headers().unwrap(),
        vec!["m", "x", "single_step_error", "repeated_error"]
    );
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let (footer, rows) = records.split_last().unwrap();
    assert_eq!(rows.len(), 6);

    let json = report(&[
        "converge",
        "--walk",
        "cycle:8",
        "--protocol",
        "strauch",
        "--format",
        "json",
    ]);
    for (row, sample) in rows.iter().zip(json["samples"].as_array().unwrap()) {
        assert_eq!(
            row[0].parse::<u64>().unwrap(),
            sample["m"].as_u64().unwrap()
        );
        for (col, key) in [(1, "x"), (2, "single_step_error"), (3, "repeated_error")] {
            assert_eq!(
                row[col].parse::<f64>().unwrap(),
                sample[key].as_f64().unwrap()
            );
        }
    }
    assert_eq!(&footer[0], "fitted_exponent");
    let exponent: f64 = footer[1].parse().unwrap();
    assert_eq!(exponent, json["fitted_exponent"].as_f64().unwrap());
    assert!((exponent - 1.0).abs() <= 0.1);
}

#[test]
fn converge_at_zero_time_is_exact() {
    let r = report(&[
        "converge",
        "--walk",
        "cycle:6",
        "--protocol",
        "evencyc",
        "--t",
        "0",
        "--format",
        "json",
    ]);
    for s in r["samples"].as_array().unwrap() {
        assert!(s["single_step_error"].as_f64().unwrap() <= 1e-12);
        assert!(s["repeated_error"].as_f64().unwrap() <= 1e-12);
    }
    assert!(r["fitted_exponent"].is_null());
}

#[test]
fn evencyc_and_strauch_reach_the_same_propagator() {
    let (s, e) = (strauch_protocol(6).unwrap(), evencyc_protocol(6).unwrap());
    for m in [32, 256, 1024] {
        let (us, es) = repeated_limit(&s, 1.0, 1.0, m).unwrap();
        let (ue, ee) = repeated_limit(&e, 1.0, 1.0, m).unwrap();
        assert!((&us - &ue).frobenius_norm() <= 2.0 * es.max(ee));
    }
}

#[test]
fn evolve_converges_at_first_order() {
    let r = report(&[
        "evolve",
        "--walk",
        "cycle:8",
        "--protocol",
        "strauch",
        "--seed",
        "4",
        "--format",
        "json",
    ]);
    assert!((r["fitted_exponent"].as_f64().unwrap() - 1.0).abs() <= 0.15);
    let csv = run(&Cli::parse_from([
        "qwl",
        "evolve",
        "--walk",
        "cycle:8",
        "--protocol",
        "strauch",
    ]))
    .unwrap()
    .text;
    assert!(csv.starts_with("m,x,state_error\n"));
}

#[test]
fn project_residuals() {
    let r = report(&["project", "--walk", "cycle:8", "--seed", "0"]);
    for key in [
        "adjacency_residual",
        "laplacian_residual",
        "reconstruction_residual",
    ] {
        assert!(r[key].as_f64().unwrap() <= 1e-10, "{key}");
    }
    assert_eq!(r["passed"], true);
    let r = report(&["project", "--walk", "cycle:4", "--t", "0"]);
    assert!(r["reconstruction_residual"].as_f64().unwrap() <= 1e-14);
}

#[test]
fn closure_reports() {
    let r = report(&["closure", "--walk", "example"]);
    assert_eq!(r["dimension"], 33);
    assert_eq!(r["ambient_dim"], 12);
    assert_eq!(r["generator_count"], 18);
    assert!(r.get("basis").is_none());
    for tol in ["1e-10", "1e-9", "1e-8"] {
        assert_eq!(
            report(&["closure", "--walk", "cycle:4", "--tol", tol])["dimension"],
            7
        );
    }
    let r = report(&["closure", "--walk", "cycle:4", "--dump-basis"]);
    let basis = r["basis"].as_array().unwrap();
    assert_eq!(basis.len(), 7);
    assert_eq!(basis[0].as_array().unwrap().len(), 8);
}

#[test]
fn simulable_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let h = write_matrix(
        dir.path(),
        "cycle.json",
        &limit_hamiltonian_cycle(4).unwrap(),
    );
    let r = report(&["simulable", "--walk", "cycle:4", "--hamiltonian", &h]);
    assert_eq!(r["simulable"], true);

    let diag = kron(
        &CMatrix::diag_real(&[-3.0, 1.0, 2.0]),
        &CMatrix::identity(4),
    );
    let h = write_matrix(dir.path(), "diag.json", &diag);
    assert_eq!(
        report(&["simulable", "--walk", "example", "--hamiltonian", &h])["simulable"],
        true
    );

    let mut corner = CMatrix::zeros(12, 12);
    corner[(0, 0)] = 1.0.into();
    let h = write_matrix(dir.path(), "corner.json", &corner);
    let r = report(&["simulable", "--walk", "example", "--hamiltonian", &h]);
    assert_eq!(r["simulable"], false);
    assert!(r["residual"].as_f64().unwrap() > 0.1);

    let mut skew = CMatrix::zeros(12, 12);
    skew[(0, 1)] = 1.0.into();
    let h = write_matrix(dir.path(), "skew.json", &skew);
    assert_eq!(
        qwl(&["simulable", "--walk", "example", "--hamiltonian", &h])
            .status
            .code(),
        Some(2)
    );
    let h = write_matrix(dir.path(), "small.json", &CMatrix::identity(3));
    assert_eq!(
        qwl(&["simulable", "--walk", "example", "--hamiltonian", &h])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn example_items_pass() {
    for tol in ["1e-9", "1e-10"] {
        let r = report(&["example", "--tol", tol]);
        assert_eq!(r["passed"], true);
        let items = r["items"].as_array().unwrap();
        assert_eq!(items.len(), 5);
        assert!(items.iter().all(|i| i["pass"] == true));
        assert_eq!(items[2]["value"], 33);
        assert_eq!(
            items[4]["value"]["imaginary_spectrum"],
            serde_json::json!([[3.0, 1], [1.0, 3], [0.0, 4], [-1.0, 3], [-3.0, 1]])
        );
    }
}

#[test]
fn protocol_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(
        &path,
        r#"{"kind": "concat", "walk": "cycle:6", "left": "strauch", "right": "evencyc"}"#,
    )
    .unwrap();
    let spec = format!("file:{}", path.display());
    let r = report(&["converge", "--protocol", &spec, "--format", "json"]);
    assert!((r["fitted_exponent"].as_f64().unwrap() - 1.0).abs() <= 0.15);

    std::fs::write(&path, r#"{"kind": "atom", "walk": "cycle:5", "steps": [{"coin": [[[0,1],[0,0]],[[0,0],[0,1]]]}]}"#)
        .unwrap();
    assert_eq!(
        qwl(&["converge", "--protocol", &spec]).status.code(),
        Some(2)
    );
}
