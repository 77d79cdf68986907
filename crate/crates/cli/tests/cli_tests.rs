use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wildstokes"));
    c.env_remove("WILDSTOKES_TRUNC_ORDER");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn write(dir: &TempDir, name: &str, v: &Value) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_string_lossy().into_owned()
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn gamma_check_fits_stirling() {
    let r = report(&["gamma-check", "--all"]);
    assert_eq!(r["schema"], "v1");
    assert_eq!(r["command"]["name"], "gamma-check");
    let a1 = &r["results"]["stirling"]["a"][1];
    assert!((a1[0].as_f64().unwrap() - 1.0 / 12.0).abs() < 1e-6);
    assert!(a1[1].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(r["results"]["stirling"]["tol_met"], true);
    assert_eq!(r["results"]["reflection"]["tol_met"], true);
    assert!(r["results"]["graded"].is_object());
    assert!(r["results"]["cocycle"].is_object());
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let args = ["gamma-check", "--reflection", "--stirling", "--seed", "9"];
    let a = without_timing(report(&args));
    let b = without_timing(report(&args));
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    assert_eq!(a["config"]["seed"], 9);
}

#[test]
fn out_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    let out = run(&[
        "exponent",
        "stokes",
        "--a",
        r#"{"p":1,"q":1,"c":[[0,0]]}"#,
        "--b",
        r#"{"p":1,"q":0,"c":[[0,0]]}"#,
        "--out",
        p,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let dirs: Vec<f64> = serde_json::from_value(r["results"]["stokes_directions"].clone()).unwrap();
    assert_eq!(dirs.len(), 2);
    assert!((dirs[0] - PI / 2.0).abs() < 1e-12 && (dirs[1] - 1.5 * PI).abs() < 1e-12);
}

#[test]
fn conjugate_equal_constant_modules_gives_identity() {
    let dir = TempDir::new().unwrap();
    let entry = |re: f64| json!({"p": 1, "v": 0, "order": 12, "coeffs": [[re, 0.0]]});
    let zero = json!({"p": 1, "v": 0, "order": 12, "coeffs": []});
    let m = json!({"matrix": [[entry(2.0), zero], [zero, entry(-3.0)]]});
    let path = write(&dir, "m.json", &m);
    let r = report(&[
        "conjugate",
        "--module",
        &path,
        "--graded",
        &path,
        "--order",
        "8",
    ]);
    assert_eq!(r["residuals"]["residual_valuation"], "inf");
    assert_eq!(r["residuals"]["beyond_order"], true);
    let f = r["results"]["F"].as_array().unwrap();
    for (i, row) in f.iter().enumerate() {
        for (j, e) in row.as_array().unwrap().iter().enumerate() {
            let v = e["v"].as_i64().unwrap();
            for (k, c) in e["coeffs"].as_array().unwrap().iter().enumerate() {
                let want = if i == j && v + k as i64 == 0 {
                    1.0
                } else {
                    0.0
                };
                assert!((c[0].as_f64().unwrap() - want).abs() < 1e-12, "F[{i}][{j}]");
                assert!(c[1].as_f64().unwrap().abs() < 1e-12);
            }
        }
    }
}

#[test]
fn identical_exponents_compare_equal() {
    let a = r#"{"p":2,"q":-1,"c":[[0.5,1],[2,0]]}"#;
    for theta in ["0", "1.3", "-2.9"] {
        let r = report(&["exponent", "compare", "--a", a, "--b", a, "--theta", theta]);
        assert_eq!(r["results"]["verdict"], "EQUAL");
    }
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(
        run(&["gamma-check", "--tol", "0.5"]).status.code(),
        Some(64)
    );
    assert_eq!(
        run(&[
            "series",
            "eval",
            "--a",
            r#"{"p":1,"v":0,"order":4,"coeffs":[[1,0]]}"#,
            "--at",
            "x"
        ])
        .status
        .code(),
        Some(64)
    );
    let env = bin()
        .args(["gamma-check", "--stirling"])
        .env("WILDSTOKES_TRUNC_ORDER", "two")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(64));
    // contract violations
    assert_eq!(
        run(&["series", "inv", "--a", "/nonexistent/x.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "series",
            "inv",
            "--a",
            r#"{"p":1,"v":0,"order":4,"coeffs":[]}"#
        ])
        .status
        .code(),
        Some(2)
    );
    let bad_exp = r#"{"p":0,"q":0,"c":[]}"#;
    assert_eq!(
        run(&["exponent", "stokes", "--a", bad_exp, "--b", bad_exp])
            .status
            .code(),
        Some(2)
    );
    // numeric failure
    let m = r#"{"matrix":[[{"p":1,"v":0,"order":8,"coeffs":[[2,0]]}]]}"#;
    let out = run(&[
        "lambda", "--mode", "series", "--module", m, "--rhs", "one", "--at", "1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // help is not an error
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn env_truncation_order_is_echoed() {
    let out = bin()
        .args(["gamma-check", "--reflection"])
        .env("WILDSTOKES_TRUNC_ORDER", "12")
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["config"]["trunc_order"], 12);
    let out = bin()
        .args(["gamma-check", "--reflection", "--trunc-order", "6"])
        .env("WILDSTOKES_TRUNC_ORDER", "12")
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["config"]["trunc_order"], 6);
}

#[test]
fn series_lambda_geometric() {
    let m = r#"{"matrix":[[{"p":1,"v":0,"order":8,"coeffs":[[0.5,0]]}]]}"#;
    let r = report(&[
        "lambda", "--mode", "series", "--module", m, "--rhs", "one", "--at", "1", "--tol", "1e-14",
    ]);
    let v = &r["results"]["value"][0];
    assert!((v[0].as_f64().unwrap() + 2.0).abs() < 1e-12);
}

#[test]
fn integral_lambda_on_gamma_block() {
    let m = r#"{"graded":[{"exponent":{"p":1,"q":-1,"c":[[1,0]]},"G":[[[0.5,0]]]}]}"#;
    let r = report(&[
        "lambda",
        "--mode",
        "integral",
        "--module",
        m,
        "--rhs",
        "fundamental-decay",
        "--at",
        "8+3i",
        "--tol",
        "1e-10",
    ]);
    assert!(r["residuals"]["relative_relation"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["results"]["twist"], 1);
}

struct Csv {
    rows: Vec<(f64, String)>,
    stokes: Vec<f64>,
}

fn sweep(a: &str, b: &str, points: usize) -> Csv {
    let n = points.to_string();
    let out = run(&["sweep", "--a", a, "--b", b, "--points", &n]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = Vec::new();
    let mut stokes = Vec::new();
    for line in text.lines().skip(1) {
        if let Some(t) = line.strip_prefix("# stokes_direction=") {
            stokes.push(t.parse().unwrap());
        } else {
            let mut f = line.split(',');
            let theta = f.next().unwrap().parse().unwrap();
            rows.push((theta, f.next().unwrap().to_string()));
        }
    }
    Csv { rows, stokes }
}

fn flips(csv: &Csv) -> Vec<f64> {
    let n = csv.rows.len();
    (0..n)
        .filter(|&k| csv.rows[k].1 != csv.rows[(k + n - 1) % n].1)
        .map(|k| csv.rows[k].0)
        .collect()
}

fn near_any(t: f64, dirs: &[f64], h: f64) -> bool {
    dirs.iter().any(|d| {
        let diff = (t - d).rem_euclid(2.0 * PI);
        diff <= h + 1e-9 || 2.0 * PI - diff <= 1e-9
    })
}

#[test]
fn sweep_slog_against_zero() {
    let csv = sweep(
        r#"{"p":1,"q":1,"c":[[0,0]]}"#,
        r#"{"p":1,"q":0,"c":[[0,0]]}"#,
        360,
    );
    assert_eq!(csv.rows.len(), 360);
    assert_eq!(csv.stokes.len(), 2);
    let h = 2.0 * PI / 360.0;
    let f = flips(&csv);
    assert!(!f.is_empty());
    assert!(
        f.iter().all(|&t| near_any(t, &[PI / 2.0, 1.5 * PI], h)),
        "{f:?}"
    );
}

#[test]
fn sweep_equal_pair_is_constant() {
    let a = r#"{"p":1,"q":-1,"c":[[1,0]]}"#;
    let csv = sweep(a, a, 90);
    assert!(csv.rows.iter().all(|(_, v)| v == "EQUAL"));
    assert!(csv.stokes.is_empty());
}

#[test]
fn sweep_flips_match_stokes_directions() {
    let pairs = [
        (
            r#"{"p":1,"q":2,"c":[[1,1]]}"#,
            r#"{"p":1,"q":-1,"c":[[0,2]]}"#,
        ),
        (
            r#"{"p":2,"q":0,"c":[[1,0],[0,1]]}"#,
            r#"{"p":1,"q":0,"c":[[0,0]]}"#,
        ),
        (
            r#"{"p":1,"q":0,"c":[[2,-1]]}"#,
            r#"{"p":1,"q":0,"c":[[0,0.5]]}"#,
        ),
    ];
    let points = 720;
    let h = 2.0 * PI / points as f64;
    for (a, b) in pairs {
        let csv = sweep(a, b, points);
        let f = flips(&csv);
        for t in &f {
            assert!(
                near_any(*t, &csv.stokes, h),
                "{a} vs {b}: flip at {t}, stokes {:?}",
                csv.stokes
            );
        }
        for d in &csv.stokes {
            assert!(
                f.iter().any(|t| near_any(*t, &[*d], h)),
                "{a} vs {b}: no flip near {d}"
            );
        }
    }
}

fn example(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/examples")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn documented_examples_run() {
    let r = report(&[
        "classify-rank1",
        "--series",
        &example("series_one_over_s.json"),
    ]);
    assert_eq!(r["results"]["exponent"]["q"], -1);
    assert_eq!(r["results"]["wild"], true);
    let r = report(&[
        "conjugate",
        "--module",
        &example("shifted_module.json"),
        "--graded",
        &example("trivial_module.json"),
        "--order",
        "20",
        "--lead",
        "-1",
    ]);
    assert_eq!(r["residuals"]["residual_valuation"], "inf");
    let f = &r["results"]["F"][0][0];
    assert_eq!(f["v"], -1);
    let cs = f["coeffs"].as_array().unwrap();
    assert!(
        (cs[0][0].as_f64().unwrap() - 1.0).abs() < 1e-12
            && (cs[1][0].as_f64().unwrap() - 1.0).abs() < 1e-12
    );
    let r = report(&[
        "split",
        "--laurent",
        &example("laurent.json"),
        "--ai",
        r#"{"p":1,"q":4,"c":[[0,0]]}"#,
        "--aj",
        &example("exponent_zero.json"),
        "--parity",
        "even",
    ]);
    assert_eq!(r["results"]["threshold"], 1.0);
    assert_eq!(r["results"]["h_plus"]["v"], 2);
    let r = report(&[
        "factor-cocycle",
        "--cocycle",
        &example("cocycle_even.json"),
        "--parity",
        "even",
    ]);
    assert!(r["residuals"]["roundtrip_distance"].as_f64().unwrap() < 1e-14);
    let r = report(&[
        "lambda",
        "--mode",
        "integral",
        "--module",
        &example("gamma_module.json"),
        "--rhs",
        "fundamental-decay",
        "--at",
        "8+3i",
        "--tol",
        "1e-10",
    ]);
    assert!(r["residuals"]["relative_relation"].as_f64().unwrap() < 1e-6);
    let m = r#"{"matrix":[[{"p":1,"v":0,"order":8,"coeffs":[[0.5,0]]}]]}"#;
    let r = report(&[
        "lambda",
        "--mode",
        "series",
        "--module",
        m,
        "--rhs",
        &example("rhs_constant.json"),
        "--at",
        "2",
        "--tol",
        "1e-13",
    ]);
    assert!((r["results"]["value"][0][0].as_f64().unwrap() + 2.0).abs() < 1e-8);
    let out = run(&[
        "sweep",
        "--a",
        &example("exponent_slog.json"),
        "--b",
        &example("exponent_zero.json"),
        "--points",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&["module", "dual", "--a", &example("gamma_module.json")]);
    assert_eq!(r["results"]["rank"], 1);
}
