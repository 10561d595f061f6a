use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn paretail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paretail")).args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Quantile grid of the unit Pareto: `x_i = (n+1)/(n+1-i)`, `i = 1..n`.
fn pareto_file(dir: &Path, n: usize) -> PathBuf {
    let path = dir.join("pareto.txt");
    let text: String = (1..=n).map(|i| format!("{}\n", (n + 1) as f64 / (n + 1 - i) as f64)).collect();
    fs::write(&path, text).unwrap();
    path
}

fn rows(out: &Output) -> Vec<csv::StringRecord> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    csv::Reader::from_reader(out.stdout.as_slice()).records().map(Result::unwrap).collect()
}

#[test]
fn hill_column_on_pareto_grid() {
    let dir = tempfile::tempdir().unwrap();
    let data = pareto_file(dir.path(), 1000);
    let out = paretail(&["estimate", arg(&data), "--k-min", "100", "--k-max", "100"]);
    let r = rows(&out);
    assert_eq!(r.len(), 1);
    // top k values are (n+1)/j over the threshold (n+1)/(k+1)
    let k = 100;
    let expected: f64 = (1..=k).map(|j| ((k + 1) as f64 / j as f64).ln()).sum::<f64>() / k as f64;
    let got: f64 = r[0][2].parse().unwrap();
    assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
}

#[test]
fn x_below_threshold_marks_row_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let data = pareto_file(dir.path(), 500);
    let out = paretail(&["estimate", arg(&data), "--k-min", "20", "--k-max", "60", "--k-step", "20", "--x", "1.5"]);
    let r = rows(&out);
    assert_eq!(r.len(), 3);
    for row in &r {
        let status = row.get(row.len() - 1).unwrap();
        assert!(status.contains("weissman"), "{status}");
        assert!(!row[2].is_empty());
    }
}

#[test]
fn estimate_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = pareto_file(dir.path(), 400);
    let args = ["estimate", arg(&data), "--k-min", "20", "--k-max", "100", "--k-step", "40", "--method", "mcmc",
        "--mcmc-iters", "2000", "--burn-in", "500", "--seed", "9", "--x", "50"];
    let a = paretail(&args);
    let b = paretail(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("k,threshold,hill,tau,epd_xi,epd_delta,bayes_xi,bayes_delta,hpd_lower,hpd_upper,p_weissman"));
}

#[test]
fn estimate_writes_manifest_with_digest() {
    let dir = tempfile::tempdir().unwrap();
    let data = pareto_file(dir.path(), 300);
    let out_path = dir.path().join("est.json");
    let out = paretail(&["estimate", arg(&data), "--k-max", "50", "--format", "json", "--out", arg(&out_path)]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&fs::read(&out_path).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 41);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("est.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "estimate");
    assert_eq!(manifest["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.txt");
    assert_eq!(paretail(&["estimate", arg(&missing)]).status.code(), Some(2));
    let data = pareto_file(dir.path(), 100);
    assert_eq!(paretail(&["estimate", arg(&data), "--k-min", "3"]).status.code(), Some(1));
    assert_eq!(paretail(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(paretail(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_rejects_zero_reps() {
    let out = paretail(&["simulate", "--reps", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_lists_supported_distributions() {
    let out = paretail(&["simulate", "--distribution", "weibull"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("frechet, burr, loggamma"), "{err}");
}

#[test]
fn bundled_config_runs_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/burr_500.toml");
    let prefix = dir.path().join("b500");
    let out = paretail(&["simulate", "--config", arg(&config), "--reps", "3", "--k-max", "60", "--out", arg(&prefix)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("b500.csv")).unwrap();
    // 11 values of k for each of three estimators, plus the header
    assert_eq!(csv.lines().count(), 1 + 3 * 11);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("b500.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seeds"][0], 20240917);
    assert_eq!(manifest["config"]["reps"], 3);
    assert!(manifest["input_digest"].is_string());
}

#[test]
fn asymptotics_curve_properties() {
    let out = paretail(&["asymptotics", "--xi", "0.5", "--rho", "-1", "--lambda-max", "5", "--lambda-points", "51"]);
    let r = rows(&out);
    assert_eq!(r.len(), 51);
    for row in &r {
        let v: Vec<f64> = row.iter().map(|s| s.parse().unwrap()).collect();
        assert!(v[3] <= v[2] + 1e-12, "mse_opt {} > mse_ml {}", v[3], v[2]);
    }
    let first: Vec<f64> = r[0].iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert_eq!(first[1], 0.25);
    assert_eq!(first[3], 0.25);
    let again = paretail(&["asymptotics", "--xi", "0.5", "--rho", "-1", "--lambda-max", "5", "--lambda-points", "51"]);
    assert_eq!(out.stdout, again.stdout);
}
