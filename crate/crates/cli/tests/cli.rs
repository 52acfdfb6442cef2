use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use tfse_cli::config::RunConfig;
use tfse_cli::Axis;
use tfse_core::estimates::dyadic;
use tfse_core::kernel::{default_x_grid, KernelSpec};

fn tfse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfse")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Second CSV line as fields.
fn row(text: &str) -> Vec<String> {
    text.lines().nth(1).unwrap().split(',').map(str::to_string).collect()
}

#[test]
fn default_config_round_trips() {
    let cfg = RunConfig::default();
    let back = RunConfig::parse(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn partial_config_keeps_defaults() {
    let cfg = RunConfig::parse("[spec]\nbeta = 2.0\n[grid]\nt_points = 5\n").unwrap();
    assert_eq!(cfg.spec.beta, 2.0);
    assert_eq!(cfg.spec.alpha, 0.5);
    assert_eq!(cfg.grid.t_points, 5);
    assert_eq!(cfg.t_grid().len(), 5);
    cfg.validate().unwrap();
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(RunConfig::parse("[spec]\ngamma = 1.0\n").is_err());
    for text in ["[grid]\nn_values = []\n", "[grid]\nn_values = [3.0]\n", "[tolerances]\nslope = -1.0\n", "[spec]\nalpha = 1.5\n"] {
        assert!(RunConfig::parse(text).unwrap().validate().is_err(), "{text}");
    }
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "[spec]\nn = 2\nalpha = 0.3\n[tolerances]\nslope = 0.2\n").unwrap();
    let o = tfse(&["config", "--config", path.to_str().unwrap(), "--tol", "0.01"]);
    assert!(o.status.success());
    let cfg = RunConfig::parse(&stdout(&o)).unwrap();
    assert_eq!((cfg.spec.n, cfg.spec.alpha, cfg.tolerances.slope), (2, 0.3, 0.01));
}

#[test]
fn ml_reproduces_exp_and_the_origin() {
    let o = tfse(&["ml", "--alpha", "1", "--z", "0,-1"]);
    assert!(o.status.success());
    let r = row(&stdout(&o));
    assert!((r[3].parse::<f64>().unwrap() - 1f64.cos()).abs() < 1e-15);
    assert!((r[4].parse::<f64>().unwrap() + 1f64.sin()).abs() < 1e-15);
    let r = row(&stdout(&tfse(&["ml", "--alpha", "0.5", "--z", "0,0"])));
    assert_eq!((r[3].parse::<f64>().unwrap(), r[4].parse::<f64>().unwrap()), (1.0, 0.0));
}

#[test]
fn ml_matches_the_closed_form_at_alpha_half() {
    // E_{1/2}(z) = exp(z²) erfc(−z); at z = −30i this is −0.018816784868660727…i
    let r = row(&stdout(&tfse(&["ml", "--alpha", "0.5", "--z", "0,-30"])));
    let im: f64 = r[4].parse().unwrap();
    assert!((im + 0.018816784868660728).abs() < 1e-15, "{im}");
    assert!(r[3].parse::<f64>().unwrap().abs() < 1e-15);
}

#[test]
fn errors_are_machine_readable() {
    let o = tfse(&["ml", "--alpha", "1.5", "--z", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("1.5"));
    assert_eq!(tfse(&["ml", "--alpha", "0.5", "--z", "nope"]).status.code(), Some(2));
}

#[test]
fn kernel_output_is_deterministic_and_lossless() {
    let args = ["kernel", "--t", "3", "--N", "2", "--x-max", "5", "--x-points", "11"];
    let (a, b) = (tfse(&args), tfse(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let spec = KernelSpec::new(1, 0.5, 1.0).unwrap();
    let direct = tfse_core::kernel::kernel_band(spec, 3.0, dyadic(2.0).unwrap(), 2.5).unwrap();
    let text = stdout(&a);
    let line = text.lines().find(|l| l.split(',').nth(2) == Some("2.5000000000000000e0")).unwrap();
    let f: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!((f[3], f[4]), (direct.value.re, direct.value.im));
}

#[test]
fn kernel_at_time_zero_does_not_depend_on_alpha() {
    // E_α(0) = 1 for every α, so K_0^N is the same reference profile
    let a = tfse(&["kernel", "--t", "0", "--N", "1", "--alpha", "0.3", "--x-points", "21"]);
    let b = tfse(&["kernel", "--t", "0", "--N", "1", "--alpha", "0.9", "--x-points", "21"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn kernel_profile_max_matches_the_sweep_cell() {
    let spec = KernelSpec::new(1, 0.5, 1.0).unwrap();
    let xs = default_x_grid(dyadic(4.0).unwrap(), 48);
    let (text, failed) = tfse_cli::kernel(spec, 100.0, Some(4.0), &xs).unwrap();
    assert_eq!(failed, 0);
    let max = text.lines().skip(1).map(|l| l.split(',').nth(5).unwrap().parse::<f64>().unwrap()).fold(0.0, f64::max);
    let mut cfg = RunConfig::default();
    cfg.grid.t_min = 100.0;
    cfg.grid.t_max = 100.0;
    cfg.grid.t_points = 1;
    cfg.grid.n_values = vec![4.0];
    cfg.grid.x_points = 48;
    let (_, recs) = tfse_cli::sweep(&cfg).unwrap();
    assert_eq!(recs[0].sup_k, max);
}

fn small_sweep(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("small.toml");
    std::fs::write(&cfg, "[grid]\nt_min = 100.0\nt_max = 10000.0\nt_points = 4\nn_values = [1.0, 2.0]\nx_points = 64\n").unwrap();
    let out = dir.join("out");
    let o = tfse(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out.join("sweep.csv")
}

#[test]
fn sweep_fit_and_plotdata() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = small_sweep(dir.path());
    let text = std::fs::read_to_string(&sweep).unwrap();
    assert_eq!(text.lines().count(), 1 + 8);

    let fits = tfse_cli::fit(&text, Axis::T).unwrap();
    assert_eq!(fits.len(), 2);
    for g in &fits {
        assert!((g.fit.slope + 0.5).abs() < 0.05, "{:?}", g.fit);
    }

    let plots = dir.path().join("plots");
    let args = ["plotdata", "--input", sweep.to_str().unwrap(), "--out", plots.to_str().unwrap()];
    assert!(tfse(&args).status.success());
    let data = std::fs::read(plots.join("sweep_loglog.csv")).unwrap();
    let fit = std::fs::read(plots.join("sweep_fit.csv")).unwrap();
    assert!(String::from_utf8_lossy(&data).starts_with("N,log10_t,log10_sup_K\n"));
    assert_eq!(String::from_utf8_lossy(&fit).lines().count(), 1 + 8);
    // reruns reproduce the bytes
    assert!(tfse(&args).status.success());
    assert_eq!(std::fs::read(plots.join("sweep_loglog.csv")).unwrap(), data);
    assert_eq!(std::fs::read(plots.join("sweep_fit.csv")).unwrap(), fit);
}

#[test]
fn plotdata_rejects_an_empty_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, format!("{}\n", tfse_core::estimates::SWEEP_CSV_HEADER)).unwrap();
    let o = tfse(&["plotdata", "--input", empty.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(serde_json::from_slice::<serde_json::Value>(&o.stderr).unwrap()["error"].is_string());
    let missing = tfse(&["plotdata", "--input", "/nonexistent/sweep.csv"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn verify_ode_passes() {
    let o = tfse(&["verify", "--check", "ode", "--alpha", "0.5", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["pass"], true);
    assert!(doc["reports"][0]["max_residual"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn verify_thm12_fits_the_time_decay() {
    let o = tfse(&["verify", "--check", "thm12", "--n", "1", "--beta", "1", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let slope = doc["reports"][0]["metrics"]["slope"].as_f64().unwrap();
    assert!((slope + 0.5).abs() <= 0.05, "{slope}");
}

#[test]
fn failed_checks_exit_nonzero_and_still_write_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // no fit is exact to 1e-12
    let o = tfse(&["verify", "--check", "thm12", "--tol", "1e-12", "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify-thm12.json")).unwrap()).unwrap();
    assert_eq!(doc["pass"], false);
}

#[test]
fn verify_sharpness_has_a_positive_constant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, "[grid]\nt_points = 3\nn_values = [1.0, 4.0, 16.0]\nx_points = 128\n").unwrap();
    let o = tfse(&["verify", "--check", "sharpness", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["reports"][0]["params"]["c_min"].as_f64().unwrap() > 0.0);
}

#[test]
fn besov_of_a_gaussian() {
    let o = tfse(&["besov", "--s", "0", "--p", "2", "--q", "2", "--width", "1"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // Ḃ^0_{2,2} ≈ ‖e^{−x²/2}‖_2 = π^{1/4} up to the almost-orthogonality of the bands
    let v = doc["value"].as_f64().unwrap();
    assert!(v > 0.5 * std::f64::consts::PI.powf(0.25) && v < 1.5 * std::f64::consts::PI.powf(0.25), "{v}");
    let csv = tfse(&["besov", "--s", "0", "--p", "2", "--q", "2", "--csv"]);
    assert!(stdout(&csv).starts_with("j,two_pow_js,block_lp,weighted\n"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn configs_round_trip(n in 1u32..4, alpha in 0.05f64..1.0, beta in 0.1f64..4.0, t_min in 1e-3f64..1e2, pts in 1usize..20, tol in 1e-6f64..1.0) {
        let mut cfg = RunConfig::default();
        cfg.spec.n = n;
        cfg.spec.alpha = alpha;
        cfg.spec.beta = beta;
        cfg.grid.t_min = t_min;
        cfg.grid.t_points = pts;
        cfg.tolerances.slope = tol;
        let back = RunConfig::parse(&cfg.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
