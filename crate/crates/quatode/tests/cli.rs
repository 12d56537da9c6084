use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quatode::report::SolveReport;
use quatode_core::Quaternion;
use tempfile::TempDir;

fn quatode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatode")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["x", "psi0", "psi1", "psi2", "psi3", "dpsi0", "dpsi1", "dpsi2", "dpsi3", "residual_norm"]
    );
    r.records()
        .map(|rec| rec.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect()
}

#[test]
fn solve_example_one_reports_modulus_five() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("report.json");
    let o = quatode(&["solve", &scenario("example1.json"), "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("|W|^2 = 5"), "{}", stdout(&o));
    let report: SolveReport = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let basis = report.basis.as_ref().unwrap();
    assert!((basis.wronskian_modulus_squared - 5.0).abs() < 1e-10);
    assert_eq!(basis.solves_equation, [true, false]);
    // parse(print(report)) = report
    let again: SolveReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(again, report);
}

#[test]
fn solve_example_four_particular_samples() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("report.json");
    let o = quatode(&["solve", &scenario("example4.json"), "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: SolveReport = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let p = report.particular.unwrap();
    let at = |x: f64| {
        let s = p.samples.iter().find(|s| s.x == x).unwrap();
        Quaternion::from_array(s.value)
    };
    let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
    assert!(at(0.0).dist(k / 2.0) < 1e-12);
    assert!(at(1.0).dist((i + j) / 2.0 + k / 2.0) < 1e-12);
    assert!(p.max_residual < 1e-10);
    assert!(p.variation_deviation.unwrap() < 1e-6);
    let c = report.constants.unwrap();
    assert!(c.initial_defect.iter().all(|d| *d < 1e-10));
}

#[test]
fn output_is_deterministic() {
    let a = quatode(&["solve", &scenario("example4.json")]);
    let b = quatode(&["solve", &scenario("example4.json")]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn empty_and_invalid_scenarios_exit_two() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.json", "");
    let o = quatode(&["solve", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let missing = write(&dir, "missing.json", r#"{"kind": "homogeneous-const", "a": [0,0,0,0], "b": [-1,0,0,0]}"#);
    let o = quatode(&["solve", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`q`"), "{}", stderr(&o));
    let o = quatode(&["solve", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solver_errors_exit_three_with_name() {
    let dir = TempDir::new().unwrap();
    // e^{ix} does not solve Ψ'' = Ψ
    let bad = write(&dir, "bad.json", r#"{"kind": "homogeneous-const", "a": [0,0,0,0], "b": [1,0,0,0], "q": [0,1,0,0]}"#);
    let o = quatode(&["solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("NotASolution"), "{}", stderr(&o));
}

#[test]
fn non_finite_state_exits_four() {
    let dir = TempDir::new().unwrap();
    let blow = write(
        &dir,
        "blow.json",
        r#"{"kind": "ivp-numeric", "a": [0,0,0,0], "b": [1e6,0,0,0], "x_end": 10, "h": 0.1, "f": [1,0,0,0], "g": [1,0,0,0]}"#,
    );
    let out = dir.path().join("t.csv");
    let o = quatode(&["integrate", blow.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("NonFiniteState"));
}

#[test]
fn integrate_zero_ivp_gives_constant_rows() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("zero.csv");
    let o = quatode(&["integrate", &scenario("zero-ivp.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert_eq!(&r[1..], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }
}

#[test]
fn integrate_example_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ex1.csv");
    let o = quatode(&["integrate", &scenario("example1-ivp.json"), "--out", out.to_str().unwrap(), "--h", "1e-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_csv(&out);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 2.0);
    let want = [2f64.cos(), -(2f64.sin()), 0.0, 0.0];
    for (got, want) in last[1..5].iter().zip(want) {
        assert!((got - want).abs() < 1e-5);
    }
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    assert!(rows.iter().all(|r| r[9] < 1e-5));
    assert!(stdout(&o).contains("max residual norm"));
}

#[test]
fn integrate_example_three_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ex3.csv");
    let o = quatode(&["integrate", &scenario("example3-ivp.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (i, j) = (Quaternion::I, Quaternion::J);
    let q = -(i + j) / 2.0;
    for r in read_csv(&out) {
        let x = r[0];
        let want = (Quaternion::real(x) + (i - j) / 2.0) * q.exp_qx(x);
        let got = Quaternion::new(r[1], r[2], r[3], r[4]);
        assert!(got.dist(want) < 1e-5, "x={x}: {got} vs {want}");
    }
}

#[test]
fn wronskian_command() {
    let o = quatode(&["wronskian", &scenario("example1-wronskian.json"), "--x", "0.0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("|W|^2 = 5"), "{text}");
    assert!(text.contains("linearly independent"));
    let o = quatode(&["wronskian", &scenario("example3.json"), "--x", "-0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // at x = 0 the reduction-of-order partner vanishes, so variants are undefined
    let o = quatode(&["wronskian", &scenario("example3.json"), "--x", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("variants undefined"));
}

#[test]
fn verify_paper_modes() {
    let o = quatode(&["verify-paper", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert!(names.contains(&"ex1-residual".to_string()));
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);

    let o = quatode(&["verify-paper"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), names.len());

    let o = quatode(&["verify-paper", "--perturb", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
    let failing: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with("FAIL")).map(String::from).collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].contains("ex1-residual"));
}
