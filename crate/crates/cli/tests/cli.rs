use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn nccalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nccalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SIGMA_X: &str = r#"{"n":2,"re":[[0,1],[1,0]],"im":[[0,0],[0,0]]}"#;
const DIAG12: &str = r#"{"n":2,"re":[[1,0],[0,2]],"im":[[0,0],[0,0]]}"#;

fn entries(m: &Value) -> Vec<(f64, f64)> {
    let re = m["re"].as_array().unwrap();
    let im = m["im"].as_array().unwrap();
    re.iter()
        .flat_map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()))
        .zip(
            im.iter()
                .flat_map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap())),
        )
        .collect()
}

#[test]
fn eval_square_of_pauli_x_is_identity() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", SIGMA_X);
    let out = nccalc(&["eval", "-e", "X1*X1", "--point", s(&p)]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        entries(&json(&out)["value"]),
        vec![(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]
    );
}

#[test]
fn eval_constant_is_scalar_identity() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", DIAG12);
    let out = nccalc(&["eval", "-e", "2+3i", "--point", s(&p)]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        entries(&json(&out)["value"]),
        vec![(2.0, 3.0), (0.0, 0.0), (0.0, 0.0), (2.0, 3.0)]
    );
}

#[test]
fn eval_real_pair_point() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ab.json", &format!(r#"{{"A":{SIGMA_X},"B":{DIAG12}}}"#));
    let out = nccalc(&["eval", "-e", "A1 B1", "--point", s(&p)]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        entries(&json(&out)["value"]),
        vec![(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (0.0, 0.0)]
    );
}

#[test]
fn malformed_point_is_io_error() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", "[[0,1],[1,0]");
    let out = nccalc(&["eval", "-e", "X1", "--point", s(&p)]);
    assert_eq!(code(&out), 4);
    let missing = nccalc(&["eval", "-e", "X1", "--point", "/nonexistent/p.json"]);
    assert_eq!(code(&missing), 4);
}

#[test]
fn parse_error_reports_position() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", SIGMA_X);
    let out = nccalc(&["eval", "-e", "X1 + * 2", "--point", s(&p)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 5"));
}

#[test]
fn domain_violation_exits_three() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", SIGMA_X);
    // sigma_x has eigenvalue -1
    let out = nccalc(&["eval", "-e", "sqrtm(X1)", "--point", s(&p)]);
    assert_eq!(code(&out), 3);
}

#[test]
fn derive_both_methods_agree_on_square() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", SIGMA_X);
    let z = write(&dir, "z.json", DIAG12);
    let out = nccalc(&["derive", "-e", "X1*X1", "--point", s(&p), "--dir", s(&z)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["inter_method_residual"].as_f64().unwrap() <= 1e-6);
    // XZ + ZX for X = sigma_x, Z = diag(1, 2): off-diagonal 3s
    let alg = entries(&v["algebraic"]["value"]);
    let want = [(0.0, 0.0), (3.0, 0.0), (3.0, 0.0), (0.0, 0.0)];
    for (a, w) in alg.iter().zip(want) {
        assert!((a.0 - w.0).abs() < 1e-12 && (a.1 - w.1).abs() < 1e-12);
    }
}

#[test]
fn derive_of_identity_map_echoes_direction() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", SIGMA_X);
    let z = write(&dir, "z.json", DIAG12);
    let out = nccalc(&[
        "derive",
        "-e",
        "X1",
        "--point",
        s(&p),
        "--dir",
        s(&z),
        "--method",
        "alg",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        entries(&json(&out)["algebraic"]["value"]),
        entries(&serde_json::from_str(DIAG12).unwrap())
    );
}

#[test]
fn algebraic_derivative_refused_for_nonpolynomial() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", SIGMA_X);
    let out = nccalc(&[
        "derive",
        "--method",
        "alg",
        "-e",
        "sqrtm(X1'X1)",
        "--point",
        s(&p),
        "--dir",
        s(&p),
    ]);
    assert_eq!(code(&out), 5);
}

#[test]
fn cr_holds_for_parts_of_square() {
    let args = [
        "check",
        "cr",
        "-u",
        "A1 A1 - B1 B1",
        "-v",
        "A1 B1 + B1 A1",
        "--sizes",
        "2,3",
        "--samples",
        "50",
        "--seed",
        "7",
    ];
    let out = nccalc(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 100);
    assert!(reports.iter().all(|r| r["verdict"] == "pass" && r["seed"] == 7));
}

#[test]
fn cr_fails_with_witness_for_square_of_real_part() {
    let out = nccalc(&[
        "check",
        "cr",
        "-u",
        "A1 A1",
        "-v",
        "0",
        "--sizes",
        "2",
        "--samples",
        "4",
    ]);
    assert_eq!(code(&out), 1);
    let reports = json(&out);
    let failing: Vec<&Value> = reports
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["verdict"] == "fail")
        .collect();
    assert!(!failing.is_empty());
    assert!(failing[0]["witness"].is_object() || failing[0]["witness"].is_array());
}

#[test]
fn cr_route_alg_needs_expression() {
    let out = nccalc(&["check", "cr", "-u", "A1", "-v", "B1", "--route", "alg"]);
    assert_eq!(code(&out), 2);
    let ok = nccalc(&["check", "cr", "-e", "X1 X1 X1", "--route", "alg", "--samples", "2"]);
    assert_eq!(code(&ok), 0);
}

#[test]
fn adjoint_fails_similarity_on_complex_tuples() {
    let out = nccalc(&["check", "axioms", "-e", "X1'", "--space", "cnc", "--samples", "3"]);
    assert_eq!(code(&out), 1);
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    let by = |check: &str, verdict: &str| reports.iter().any(|r| r["check"] == check && r["verdict"] == verdict);
    assert!(by("similarity", "fail"));
    assert!(!by("graded", "fail") && !by("direct_sums", "fail") && !by("unitary_equiv", "fail"));
}

#[test]
fn adjoint_is_fine_on_hermitian_tuples() {
    let out = nccalc(&["check", "axioms", "-e", "X1' X1", "--space", "hnc", "--samples", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn reconstruct_accepts_and_rejects() {
    let yes = nccalc(&[
        "reconstruct",
        "-u",
        "A1 A1 - B1 B1",
        "-v",
        "A1 B1 + B1 A1",
        "--samples",
        "3",
    ]);
    assert_eq!(code(&yes), 0);
    assert_eq!(json(&yes)["verdict"], "nc-function: yes");
    let no = nccalc(&["reconstruct", "-u", "A1 A1", "-v", "0", "--samples", "3"]);
    assert_eq!(code(&no), 1);
    let v = json(&no);
    assert_eq!(v["nc_function"], false);
    assert!(v["verdict"].as_str().unwrap().starts_with("nc-function: no ("));
}

#[test]
fn fdiff_and_diag_pass_for_polynomials() {
    let f = nccalc(&["check", "fdiff", "-e", "X1 X2 X1 - 2 X2", "--samples", "2"]);
    assert_eq!(code(&f), 0, "{}", String::from_utf8_lossy(&f.stderr));
    let d = nccalc(&["check", "diag", "-e", "X1 X2 + X2 X2 X1", "--samples", "3"]);
    assert_eq!(code(&d), 0, "{}", String::from_utf8_lossy(&d.stderr));
}

#[test]
fn decompose_square() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ab.json", &format!(r#"{{"A":{SIGMA_X},"B":{DIAG12}}}"#));
    let out = nccalc(&["decompose", "-e", "X1*X1", "--point", s(&p)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    // A^2 - B^2 and AB + BA
    assert_eq!(
        entries(&v["u_value"]),
        vec![(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-3.0, 0.0)]
    );
    assert_eq!(
        entries(&v["v_value"]),
        vec![(0.0, 0.0), (3.0, 0.0), (3.0, 0.0), (0.0, 0.0)]
    );
}

#[test]
fn runs_are_byte_identical_and_out_file_matches() {
    let dir = TempDir::new().unwrap();
    let args = [
        "check",
        "axioms",
        "-e",
        "X1 X2 - X2' X1",
        "--seed",
        "11",
        "--samples",
        "2",
    ];
    let a = nccalc(&args);
    let b = nccalc(&args);
    assert_eq!(a.stdout, b.stdout);
    let out = dir.path().join("r.json");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", s(&out)]);
    let c = nccalc(&with_out);
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.cfg", "seed = 3\nsamples = 2\nsizes = 2\n");
    let out = nccalc(&["check", "fdiff", "-e", "X1 X1", "--config", s(&cfg), "--seed", "5"]);
    assert_eq!(code(&out), 0);
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(|r| r["seed"] == 5));
    let bad = write(&dir, "bad.cfg", "colour = red\n");
    assert_eq!(code(&nccalc(&["check", "fdiff", "-e", "X1", "--config", s(&bad)])), 2);
}
