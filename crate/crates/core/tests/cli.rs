use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hypocheck::cli::load_spec;
use hypocheck::expr::{Env, Expr, Point};
use hypocheck::feq::{self, fixtures};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value as Json;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.toml"))
}

fn hypocheck(args: &[&str], spec: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypocheck"))
        .args(&args[..1])
        .arg(spec)
        .args(&args[1..])
        .output()
        .expect("binary runs")
}

fn code(args: &[&str], spec: &Path) -> i32 {
    hypocheck(args, spec).status.code().expect("exit code")
}

fn write_spec(dir: &tempfile::TempDir, body: &str) -> PathBuf {
    let p = dir.path().join("spec.toml");
    std::fs::write(&p, body).unwrap();
    p
}

const TWO_TERMS_ONE_BLOCK: &str = r#"
[equation]
n = 1
r = 1
k = 2
t0 = ["0"]
b = "0"

[[term]]
a = "1"
phi = ["t1"]
"#;

const SHORT_PHI: &str = r#"
[equation]
n = 2
r = 1
k = 1
t0 = ["0"]
b = "0"

[[term]]
a = "1"
phi = ["t1"]
"#;

const NO_CANDIDATE: &str = r#"
[equation]
n = 1
r = 1
k = 1
t0 = ["0"]
b = "0"

[[term]]
a = "1"
phi = ["t1"]
"#;

const LOG_CANDIDATE: &str = r#"
[equation]
n = 1
r = 1
k = 2
t0 = ["0"]
b = "0"

[[term]]
a = "1"
phi = ["t1"]

[[term]]
a = "1"
phi = ["-t1"]

[candidate]
f = "log(x1)"
"#;

const SHIFTED: &str = r#"
[equation]
n = 1
r = 1
k = 1
t0 = ["0"]
b = "0"

[[term]]
a = "1"
phi = ["t1 + 1"]
"#;

#[test]
fn check_exit_codes() {
    assert_eq!(code(&["check"], &fixture("jensen")), 0);
    assert_eq!(code(&["check"], &fixture("heatmv")), 0);
    assert_eq!(code(&["check"], &fixture("single-direction")), 1);
    assert_eq!(code(&["check"], &fixture("exp-weight")), 1);
    assert_eq!(code(&["check"], &fixture("degenerate")), 0);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = hypocheck(&["check"], &write_spec(&dir, TWO_TERMS_ONE_BLOCK));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("term count mismatch"), "{err}");
    assert!(err.contains("line 5"), "{err}");

    let out = hypocheck(&["check"], &write_spec(&dir, SHORT_PHI));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("phi"));

    assert_eq!(code(&["check"], &dir.path().join("missing.toml")), 2);
    assert_eq!(code(&["check", "--depth", "x"], &fixture("jensen")), 2);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&["verify"], &fixture("quadratic")), 0);
    assert_eq!(code(&["verify"], &fixture("heatmv")), 0);
    assert_eq!(code(&["verify"], &write_spec(&dir, NO_CANDIDATE)), 2);
    assert_eq!(code(&["verify", "--h", "0"], &fixture("quadratic")), 2);
    assert_eq!(code(&["verify"], &write_spec(&dir, LOG_CANDIDATE)), 3);
}

#[test]
fn vacuous_candidate_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let body = std::fs::read_to_string(fixture("quadratic")).unwrap().replace("f = \"x1^2\"", "f = \"x1^2 + 1/100*x1^3\"");
    let out = hypocheck(&["verify"], &write_spec(&dir, &body));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("vacuous: f is not a solution"));
}

#[test]
fn derive_refuses_shift_at_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let out = hypocheck(&["derive"], &write_spec(&dir, SHIFTED));
    assert_eq!(out.status.code(), Some(1));
    let text = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    assert!(text.contains("shift-at-anchor nonzero"), "{text}");
    assert_eq!(code(&["derive"], &fixture("jensen")), 0);
}

#[test]
fn brackets_on_grushin() {
    assert_eq!(code(&["brackets"], &fixture("grushin")), 0);
    assert_eq!(code(&["brackets", "--depth", "0"], &fixture("grushin")), 1);
    let out = hypocheck(&["brackets", "--json", "-"], &fixture("grushin"));
    let json: Json = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["exit_code"], 0);
}

#[test]
fn selftest_passes() {
    let out = Command::new(env!("CARGO_BIN_EXE_hypocheck")).arg("selftest").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(code(&["selftest"], &fixture("degenerate")), 0);
}

#[test]
fn thread_setting_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_hypocheck"))
        .arg("check")
        .arg(fixture("jensen"))
        .env("HYPOCHECK_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_is_byte_identical_across_runs_and_threads() {
    for name in ["jensen", "heatmv", "degenerate", "bracket-drift"] {
        let run = |threads: &str| {
            Command::new(env!("CARGO_BIN_EXE_hypocheck"))
                .arg("check")
                .arg(fixture(name))
                .args(["--json", "-"])
                .env("HYPOCHECK_THREADS", threads)
                .output()
                .unwrap()
                .stdout
        };
        let a = run("1");
        assert!(!a.is_empty());
        assert_eq!(a, run("1"), "{name}");
        assert_eq!(a, run("3"), "{name}");
    }
}

#[test]
fn json_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = hypocheck(&["check", "--json", path.to_str().unwrap()], &fixture("jensen"));
    assert!(!out.stdout.is_empty());
    let piped = hypocheck(&["check", "--json", "-"], &fixture("jensen")).stdout;
    assert_eq!(std::fs::read(&path).unwrap(), piped);
}

fn sample_points(n: usize) -> Vec<Point> {
    let vals = [(1, 3), (-2, 5), (3, 4), (-1, 7)];
    (0..4)
        .map(|i| Point::exact((0..n).map(|l| {
            let (a, b) = vals[(i + l) % vals.len()];
            BigRational::new(BigInt::from(a), BigInt::from(b))
        }).collect()))
        .collect()
}

fn assert_same(json: &Json, e: &Expr, points: &[Point], what: &str) {
    let parsed = Expr::parse(json.as_str().unwrap()).unwrap_or_else(|err| panic!("{what}: {err}"));
    for p in points {
        let env = Env::from_x(p);
        let (a, b) = (parsed.eval(&env).unwrap().to_f64(), e.eval(&env).unwrap().to_f64());
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{what}: {a} vs {b}");
    }
}

#[test]
fn report_expressions_reparse() {
    for (name, spec) in fixtures::all() {
        let Ok(pde) = feq::derive_pde(&spec) else { continue };
        let out = hypocheck(&["derive", "--json", "-"], &fixture(name));
        let json: Json = serde_json::from_slice(&out.stdout).unwrap();
        let d = &json["derived_pde"];
        let points = sample_points(spec.n());
        let fields: Vec<_> = pde.l_fields.iter().chain([&pde.l0]).collect();
        for (i, f) in fields.iter().enumerate() {
            for (l, c) in f.coeffs().iter().enumerate() {
                assert_same(&d["fields"][i]["coeffs"][l], c, &points, &format!("{name} field {i}"));
            }
        }
        for p in 0..spec.n() {
            assert_same(&d["expansion"]["B"][p], &pde.b[p], &points, &format!("{name} B"));
            for q in 0..spec.n() {
                assert_same(&d["expansion"]["A"][p][q], &pde.a[p][q], &points, &format!("{name} A"));
            }
        }
        assert_same(&d["c"], &pde.c, &points, &format!("{name} c"));
        assert_same(&d["g"], &pde.g, &points, &format!("{name} g"));
    }
}

#[test]
fn fixture_files_match_builtins() {
    for (name, spec) in fixtures::all() {
        let file = load_spec(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(file.spec.as_ref(), Some(&spec), "{name}");
    }
}
