use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn ncpmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncpmap"))
        .args(args)
        .output()
        .expect("spawn ncpmap")
}

fn stdout_of(args: &[&str]) -> String {
    let out = ncpmap(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    serde_json::from_str(&stdout_of(args)).unwrap()
}

/// Header and data rows of a CSV output, comments removed.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn sample(dir: &Path, kind: &str) -> PathBuf {
    let path = dir.join(format!("{kind}.json"));
    let out = ncpmap(&["sample", kind, "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    path
}

#[test]
fn exit_codes() {
    assert_eq!(ncpmap(&["--help"]).status.code(), Some(0));
    assert_eq!(ncpmap(&["domain", "--section", "circle"]).status.code(), Some(1));
    assert_eq!(ncpmap(&["eigencurve", "--steps", "1"]).status.code(), Some(1));
    assert_eq!(
        ncpmap(&["domain", "--section", "minus3", "--grid-step", "0.7"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(ncpmap(&["equivalence", "--t-samples", "4"]).status.code(), Some(1));
    assert_eq!(
        ncpmap(&["domain", "--section", "minus3", "--c", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        ncpmap(&["eigencurve", "--a1", "0.9", "--a2", "0.9"]).status.code(),
        Some(1)
    );
    assert_eq!(ncpmap(&["witness", "--format", "csv"]).status.code(), Some(1));
    assert_eq!(ncpmap(&["decompose", "/nonexistent/map.json"]).status.code(), Some(2));
    assert_eq!(
        ncpmap(&["eigencurve", "--out", "/nonexistent/dir/curve.csv"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_input_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dim": 2, "b_matrix": [[1, 0]]}"#).unwrap();
    assert_eq!(ncpmap(&["decompose", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn eigencurve_rows() {
    let (header, rows) = csv_rows(&stdout_of(&["eigencurve"]));
    assert_eq!(header[..5], ["omega_t", "lambda1", "lambda2", "lambda3", "lambda4"]);
    assert_eq!(header.last().unwrap(), "max_dev");
    assert_eq!(rows.len(), 513);
    let first: Vec<f64> = rows[0].iter().map(|s| num(s)).collect();
    assert_eq!(first[..5], [0.0, 2.0, 0.0, 0.0, 0.0]);
    let middle = &rows[256];
    assert_eq!(num(&middle[0]), std::f64::consts::PI);
    assert!(num(&middle[3]).abs() < 1e-12 && num(&middle[4]).abs() < 1e-12);
    assert!(rows.iter().all(|r| num(r.last().unwrap()) < 1e-10));
}

#[test]
fn eigencurve_json_matches_csv() {
    let csv = stdout_of(&["eigencurve", "--steps", "9"]);
    let json = json_of(&["eigencurve", "--steps", "9", "--format", "json"]);
    let (header, rows) = csv_rows(&csv);
    assert_eq!(json["columns"].as_array().unwrap().len(), header.len());
    for (row, jrow) in rows.iter().zip(json["rows"].as_array().unwrap()) {
        for (cell, jcell) in row.iter().zip(jrow.as_array().unwrap()) {
            assert_eq!(num(cell), jcell.as_f64().unwrap());
        }
    }
    assert_eq!(json["meta"]["abs_a_sq"], "0.5");
}

#[test]
fn domain_sections() {
    let (header, rows) = csv_rows(&stdout_of(&["domain", "--section", "minus3"]));
    assert_eq!(header, ["section_name", "u", "v"]);
    for r in &rows {
        assert_eq!(r[0], "minus3");
        let radius = num(&r[1]).hypot(num(&r[2]));
        assert!((radius - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }
    let (_, rows) = csv_rows(&stdout_of(&["domain", "--section", "plusminus"]));
    for r in &rows {
        let (u, v) = (num(&r[1]), num(&r[2]));
        assert!((u * u + 2.0 * v * v - 1.0).abs() < 1e-12);
    }
    for section in ["minus3", "plusminus"] {
        let (_, rows) = csv_rows(&stdout_of(&["domain", "--section", section, "--c", "0"]));
        for r in &rows {
            assert!((num(&r[1]).hypot(num(&r[2])) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn domain_grid() {
    let (header, rows) = csv_rows(&stdout_of(&["domain", "--section", "grid3d", "--grid-step", "0.25"]));
    assert_eq!(header, ["s_plus", "s_minus", "s3", "in_domain"]);
    assert_eq!(rows.len(), 9 * 9 * 9);
    let origin = rows.iter().find(|r| r[..3].iter().all(|s| num(s) == 0.0)).unwrap();
    assert_eq!(origin[3], "true");
    let pole = rows
        .iter()
        .find(|r| num(&r[0]) == 0.0 && num(&r[1]) == 0.0 && num(&r[2]) == 1.0)
        .unwrap();
    assert_eq!(pole[3], "false");
}

#[test]
fn positivity_surfaces() {
    let text = stdout_of(&["positivity", "--omega-t", "0", "--grid-step", "0.25"]);
    assert!(text.contains("# north_pole_excluded=false"));
    let (_, rows) = csv_rows(&text);
    for r in rows.iter().filter(|r| r[0] == "stretched") {
        let s: f64 = r[3..6].iter().map(|x| num(x).powi(2)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    let text = stdout_of(&["positivity", "--grid-step", "0.25"]);
    assert!(text.contains("# north_pole_excluded=true"));
    assert!(text.contains("# slab=true"));
    let (_, rows) = csv_rows(&text);
    assert!(rows.iter().all(|r| r[0] == "sphere"));
    for r in &rows {
        let inside = num(&r[5]).abs() <= std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(r[6] == "true", inside, "{r:?}");
    }

    let text = stdout_of(&["positivity", "--omega-t", "0.3", "--grid-step", "0.25"]);
    assert!(text.contains("# north_pole_excluded=true"));
}

#[test]
fn witness_report() {
    let w = json_of(&["witness"]);
    let expected = 0.5 * (1.0 - 1.5f64.sqrt());
    assert!((w["p_prime_min_eigenvalue"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert_eq!(w["w_not_completely_positive"], true);
}

#[test]
fn decompose_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = sample(dir.path(), "identity-map");
    let r = json_of(&["decompose", path.to_str().unwrap()]);
    assert_eq!(r["terms"].as_array().unwrap().len(), 1);
    assert_eq!(r["terms"][0]["sign"], 1);
    assert_eq!(r["completely_positive"], true);
}

#[test]
fn decompose_two_qubit_map() {
    let dir = tempfile::tempdir().unwrap();
    let path = sample(dir.path(), "two-qubit-map");
    let r = json_of(&["decompose", path.to_str().unwrap()]);
    let signs: Vec<i64> = r["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["sign"].as_i64().unwrap())
        .collect();
    assert_eq!(signs, [1, 1, -1, -1]);
    assert_eq!(r["completely_positive"], false);
    assert_eq!(r["trace_preserving"], true);
    assert!(r["reconstruction_deviation"].as_f64().unwrap() < 1e-12);
}

#[test]
fn reduce_two_qubit_drift() {
    let dir = tempfile::tempdir().unwrap();
    let h = sample(dir.path(), "two-qubit-hamiltonian");
    let means = sample(dir.path(), "correlated-means");
    let t = std::f64::consts::FRAC_PI_2.to_string();
    let r = json_of(&["reduce", h.to_str().unwrap(), means.to_str().unwrap(), "--t", &t]);
    let drift: Vec<f64> = r["drift"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (d, e) in drift.iter().zip([-0.5, 0.5, 0.0]) {
        assert!((d - e).abs() < 1e-12, "{drift:?}");
    }
    assert!(r["orthogonality_deviation"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["completely_positive"], false);
}

#[test]
fn pechukas_reports() {
    let dir = tempfile::tempdir().unwrap();
    let product = sample(dir.path(), "product-assignment");
    let r = json_of(&["pechukas", product.to_str().unwrap(), "--samples", "200"]);
    assert_eq!(r["product"], true);
    assert!(r["hunt"]["max_rho_b_spread"].as_f64().unwrap() < 1e-9);
    assert_eq!(r["theorem_consistent"], true);

    let perturbed = sample(dir.path(), "perturbed-assignment");
    let r = json_of(&["pechukas", perturbed.to_str().unwrap(), "--samples", "200"]);
    assert_eq!(r["product"], false);
    assert_eq!(r["hunt"]["violation_found"], true);
    assert!((r["hunt"]["min_eigenvalue"].as_f64().unwrap() + 0.025).abs() < 1e-12);
}

#[test]
fn global_flags_before_subcommand() {
    let a = stdout_of(&["--a1", "-0.3", "eigencurve", "--steps", "4"]);
    let b = stdout_of(&["eigencurve", "--steps", "4", "--a1", "-0.3"]);
    assert_eq!(a, b);
    assert!(a.contains("# a1=-0.3"));
}
