use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use maxrand::io::{MeasurementFile, ReportDocument, StateFile};
use maxrand::measurements::MeasurementBasis;
use maxrand::states::{two_qubit_basis, DensityMatrix};
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn maxrand(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxrand"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> ReportDocument {
    serde_json::from_slice(&out.stdout).expect("stdout is a report")
}

fn write_json<T: serde::Serialize>(dir: &TempDir, name: &str, value: &T) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

#[test]
fn optimal_on_qubit_state() {
    let out = maxrand(&["optimal", path_str(&data("qubit_m06.json"))]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let opt = report(&out).optimal.unwrap();
    assert!((opt.p_guess_star - 0.9).abs() < 1e-12);
    assert!((opt.h_max_star - 0.8f64.log2() - 1.0).abs() < 1e-12);
}

#[test]
fn optimal_on_maximally_mixed_is_zero() {
    let out = maxrand(&["optimal", path_str(&data("maximally_mixed4.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let opt = report(&out).optimal.unwrap();
    assert!(opt.h_min_star.abs() < 1e-12);
    assert!(opt.h_star.abs() < 1e-12);
    assert!(opt.h_max_star.abs() < 1e-12);
    assert!((opt.p_guess_star - 1.0).abs() < 1e-12);
}

#[test]
fn optimal_on_pure_qutrit_is_log3() {
    let out = maxrand(&["optimal", path_str(&data("pure3.json"))]);
    let opt = report(&out).optimal.unwrap();
    let log3 = 3f64.log2();
    for v in [opt.h_min_star, opt.h_star, opt.h_max_star] {
        assert!((v - log3).abs() < 1e-10, "{v}");
    }
}

#[test]
fn evaluate_reports_all_quantities() {
    let out = maxrand(&[
        "evaluate",
        path_str(&data("qubit_m06.json")),
        path_str(&data("sigma_x.json")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let q = report(&out).quantities.unwrap();
    assert!((q.p_guess - 0.9).abs() < 1e-9);
    assert!((q.h_min + 0.9f64.log2()).abs() < 1e-9);
    assert!((q.p_secr - 1.6).abs() < 1e-9);
    assert!(q.p_secr <= q.p_secr_upper);
}

#[test]
fn report_round_trips_through_json() {
    let out = maxrand(&[
        "evaluate",
        path_str(&data("case_study.json")),
        path_str(&data("qubit_eigenbasis.json")),
    ]);
    // the 2-dim measurement does not fit the 4-dim state
    assert_eq!(out.status.code(), Some(4));

    let out = maxrand(&["certify", path_str(&data("qubit_m06.json")), path_str(&data("sigma_x.json")), "--claim", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&out);
    let text = serde_json::to_string_pretty(&doc).unwrap();
    let back: ReportDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(back, doc);
}

#[test]
fn runs_are_deterministic() {
    let state = data("case_study.json");
    let args = [
        "search-product",
        path_str(&state),
        "--target",
        "h",
        "--seed",
        "7",
    ];
    let a = maxrand(&args);
    let b = maxrand(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn certify_accepts_and_rejects() {
    let state = data("qubit_m06.json");
    let meas = data("sigma_x.json");
    let accept = maxrand(&["certify", path_str(&state), path_str(&meas), "--claim", "0.152"]);
    assert_eq!(accept.status.code(), Some(0));
    assert!(report(&accept).verdict.unwrap().accepted);
    let reject = maxrand(&["certify", path_str(&state), path_str(&meas), "--claim", "0.2"]);
    assert_eq!(reject.status.code(), Some(1));
    assert!(!report(&reject).verdict.unwrap().accepted);
}

#[test]
fn certify_with_witness_from_a_previous_report() {
    let dir = TempDir::new().unwrap();
    let state = data("qubit_m06.json");
    let meas = data("sigma_x.json");
    let first_path = dir.path().join("first.json");
    let first = maxrand(&[
        "certify",
        path_str(&state),
        path_str(&meas),
        "--claim",
        "0.1",
        "--out",
        path_str(&first_path),
    ]);
    assert_eq!(first.status.code(), Some(0));
    assert!(first.stdout.is_empty());
    let second = maxrand(&[
        "certify",
        path_str(&state),
        path_str(&meas),
        "--claim",
        "0.1",
        "--witness",
        path_str(&first_path),
    ]);
    assert_eq!(second.status.code(), Some(0));
    let cert = report(&second).certificate.unwrap();
    assert!(cert.feasible);
    assert!((cert.upper - 0.9).abs() < 1e-6);
}

#[test]
fn sweep_writes_csv() {
    let out = maxrand(&["sweep", "qubit-m", "--from", "0", "--to", "1", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,p_guess,h_min,h,h_max");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("1,0.5,1,1,1"));
}

#[test]
fn missing_file_and_bad_json_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = maxrand(&["optimal", path_str(&dir.path().join("absent.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(maxrand(&["optimal", path_str(&bad)]).status.code(), Some(2));
    assert_eq!(maxrand(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn invalid_state_exits_3() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("trace.json");
    std::fs::write(&path, r#"{"dim": 2, "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.6, 0]]]}"#).unwrap();
    let out = maxrand(&["optimal", path_str(&path)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn dimension_mismatch_exits_4() {
    let dir = TempDir::new().unwrap();
    let meas = write_json(&dir, "m4.json", &MeasurementFile::from_basis(&MeasurementBasis::from_vectors(two_qubit_basis().to_vec(), 1e-10).unwrap()));
    let out = maxrand(&["evaluate", path_str(&data("qubit_m06.json")), path_str(&meas)]);
    assert_eq!(out.status.code(), Some(4));

    let qubit = StateFile::from_state(&DensityMatrix::maximally_mixed(2));
    let state = write_json(&dir, "rho2.json", &qubit);
    let out = maxrand(&["search-product", path_str(&state)]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn failed_search_exits_5_and_still_reports() {
    let out = maxrand(&[
        "search-product",
        path_str(&data("case_study.json")),
        "--restarts",
        "1",
        "--tol-search",
        "1e-40",
    ]);
    assert_eq!(out.status.code(), Some(5));
    let search = report(&out).search.unwrap();
    assert!(!search.success);
    assert!(search.residual > 1e-40);
    assert!(!out.stderr.is_empty());
}

#[test]
fn measurement_file_helpers_agree() {
    let m = MeasurementBasis::computational(3);
    let file = MeasurementFile::from_basis(&m);
    assert_eq!(file.to_basis(1e-10).unwrap().vectors(), m.vectors());
}
