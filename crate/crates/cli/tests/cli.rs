use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_viscap");

const SMALL: &str = r#"{
  "grid": {"L": 40, "N": 300},
  "bs_grid": {"L": 12, "N": 200},
  "schedule": {"eps_start": 0.1, "eps_ratio": 0.31622776601683794, "eps_count": 3}
}"#;

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("viscap-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn run(cmd: &str, config: &str, dir: &Path) -> (i32, PathBuf) {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let status = Command::new(BIN).args([cmd, "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    (status.code().unwrap(), out)
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    v.sort();
    v
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

/// Every field after the header parses to a finite number.
fn assert_finite_csv(p: &Path) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let width = lines.next().unwrap().split(',').count();
    let mut rows = 0;
    for l in lines {
        let cells: Vec<&str> = l.split(',').collect();
        assert_eq!(cells.len(), width, "{l}");
        for c in cells {
            let x: f64 = c.parse().unwrap_or_else(|_| panic!("{}: bad cell {c:?}", p.display()));
            assert!(x.is_finite(), "{}: {c}", p.display());
        }
        rows += 1;
    }
    assert!(rows > 0, "{} has no rows", p.display());
}

#[test]
fn malformed_config_writes_only_error_json() {
    let d = scratch("malformed");
    let (code, out) = run("sweep", "{ not json", &d);
    assert_eq!(code, 1);
    assert_eq!(files(&out), ["error.json"]);
    let e = json(&out.join("error.json"));
    assert_eq!(e["exit_code"], 1);
}

#[test]
fn unknown_field_is_rejected() {
    let d = scratch("unknown");
    let (code, out) = run("oracle", r#"{"gird": {"L": 10, "N": 100}}"#, &d);
    assert_eq!(code, 1);
    assert!(out.join("error.json").exists());
}

#[test]
fn invalid_omega_is_a_validation_error() {
    let d = scratch("omega");
    let (code, out) = run("oracle", r#"{"omega": {"a_lo": 3, "a_hi": 2, "gamma_lo": 0.5, "b_hi": 0.5}}"#, &d);
    assert_eq!(code, 1);
    assert_eq!(json(&out.join("error.json"))["exit_code"], 1);
    assert!(!out.join("oracle.json").exists());
}

#[test]
fn odd_grid_is_a_validation_error() {
    let d = scratch("odd");
    let (code, _) = run("sweep", r#"{"grid": {"L": 10, "N": 101}}"#, &d);
    assert_eq!(code, 1);
}

#[test]
fn davies_defaults() {
    let d = scratch("davies");
    let (code, out) = run("davies", "{}", &d);
    assert_eq!(code, 0);
    assert_finite_csv(&out.join("davies_sweep.csv"));
    let log = fs::read_to_string(out.join("run.log")).unwrap();
    assert!(log.contains("[INFO]"), "{log}");
}

#[test]
fn symbol_defaults() {
    let d = scratch("symbol");
    let (code, out) = run("symbol", "{}", &d);
    assert_eq!(code, 0);
    assert_finite_csv(&out.join("symbol_scan.csv"));
    let m = json(&out.join("margin_report.json"));
    assert_eq!(m["phi_arg_ok"], true);
    for s in m["sector"].as_array().unwrap() {
        assert!(s["margin"].as_f64().unwrap() > 0.0, "{s}");
    }
}

#[test]
fn symbol_theta_outside_domain() {
    let d = scratch("theta");
    let (code, out) = run("symbol", r#"{"symbol": {"theta": {"re": 0.0, "im": -2.0}}}"#, &d);
    assert_eq!(code, 1);
    assert!(out.join("error.json").exists());
}

#[test]
fn compare_small_grid_passes() {
    let d = scratch("compare");
    let (code, out) = run("compare", SMALL, &d);
    assert_eq!(code, 0);
    for f in ["sweep.csv", "resonances.json", "oracle.json", "compare_report.json", "run.log"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_finite_csv(&out.join("sweep.csv"));
    let rep = json(&out.join("compare_report.json"));
    assert_eq!(rep["pass"], true);
    let oracle = json(&out.join("oracle.json"));
    let zeros = oracle["resonances"].as_array().unwrap();
    assert_eq!(zeros.len(), 1);
    assert!(zeros[0]["residual"].as_f64().unwrap() < 1e-8);
    let want = (31f64.sqrt() / 2.0, -0.5);
    let got = (zeros[0]["lambda"]["re"].as_f64().unwrap(), zeros[0]["lambda"]["im"].as_f64().unwrap());
    assert!((got.0 - want.0).hypot(got.1 - want.1) < 1e-3, "{got:?}");
}

#[test]
fn compare_tight_delta_fails_the_check() {
    let d = scratch("tight");
    let cfg = SMALL.trim_end().trim_end_matches('}').to_string() + r#", "tolerances": {"delta": 1e-6}}"#;
    let (code, out) = run("compare", &cfg, &d);
    assert_eq!(code, 3);
    let rep = json(&out.join("compare_report.json"));
    assert_eq!(rep["pass"], false);
    assert!(rep["entries"][0]["diagnostic"].is_string());
    assert_eq!(json(&out.join("error.json"))["exit_code"], 3);
}

#[test]
fn output_dir_from_config() {
    let d = scratch("outdir");
    let target = d.join("elsewhere");
    let cfg = format!(r#"{{"output_dir": {:?}}}"#, target.to_str().unwrap());
    fs::write(d.join("c.json"), cfg).unwrap();
    let status = Command::new(BIN).args(["symbol", "--config"]).arg(d.join("c.json")).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(target.join("margin_report.json").exists());
}
