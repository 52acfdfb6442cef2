use anyhow::{bail, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use tfse_core::besov::Spectrum;
use tfse_core::estimates::{
    check_expansion, check_full_decay, check_n_scaling, check_t_decay, check_w1_log, scaling_defect, verify_dispersive_besov,
    verify_lp_interpolation, verify_mode_ode, verify_sharpness, BesovVariant, CheckReport, DispersiveOptions,
};
use tfse_core::freq::{log_grid, CutoffProfile};
use tfse_core::kernel::Regime;

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Thm12,
    Sharpness,
    Besov7,
    Besov8,
    Besov9,
    Cor33,
    Ode,
    Lemma31,
}

/// One JSON document per invocation.
#[derive(Debug, Serialize)]
pub struct VerifyDocument {
    pub check: Check,
    pub pass: bool,
    pub reports: Vec<Value>,
    /// The effective configuration, as TOML.
    pub config: String,
}

fn push(reports: &mut Vec<Value>, pass: &mut bool, r: &CheckReport) -> Result<()> {
    *pass &= r.pass;
    reports.push(serde_json::to_value(r)?);
    Ok(())
}

pub fn run(cfg: &RunConfig, check: Check) -> Result<VerifyDocument> {
    let spec = cfg.kernel_spec()?;
    let g = &cfg.grid;
    let tol = &cfg.tolerances;
    let t_grid = cfg.t_grid();
    let mut reports = Vec::new();
    let mut pass = true;
    match check {
        Check::Thm12 => {
            let (r, _) = check_t_decay(spec, 1.0, &t_grid, g.x_points, tol.slope, tol.min_r_squared)?;
            push(&mut reports, &mut pass, &r)?;
            let (r, _) = check_n_scaling(spec, g.t_fixed, &g.n_values, g.x_points, 2.0 * tol.slope)?;
            push(&mut reports, &mut pass, &r)?;
            if spec.regime() == Regime::Subcritical {
                let (r, _) = check_full_decay(spec, &t_grid, g.x_points, tol.slope)?;
                push(&mut reports, &mut pass, &r)?;
            }
        }
        Check::Sharpness => {
            let s = verify_sharpness(spec, &t_grid, &g.n_values, g.x_points, tol.max_spread)?;
            push(&mut reports, &mut pass, &s.report(&spec, tol.max_spread))?;
        }
        Check::Besov7 | Check::Besov8 | Check::Besov9 => {
            let variant = match check {
                Check::Besov7 => BesovVariant::Eq7,
                Check::Besov8 => BesovVariant::Eq8,
                _ => BesovVariant::Eq9,
            };
            let d = &cfg.dispersive;
            let cutoff = CutoffProfile::default();
            let opts = DispersiveOptions { j_min: g.j_min, j_max: g.j_max, max_spread: tol.besov_spread, cutoff };
            let inputs = [
                ("gaussian", Spectrum::gaussian(spec.n, d.gaussian_width)?),
                ("band", Spectrum::band_bump(spec.n, d.bump_j, cutoff)?),
            ];
            for (name, f) in &inputs {
                for c in verify_dispersive_besov(spec, &t_grid, f, &d.r_values, d.s, d.p, &[variant], &opts)? {
                    push(&mut reports, &mut pass, &c.report(&spec, name, tol.besov_spread))?;
                }
            }
        }
        Check::Cor33 => {
            for &p in &cfg.dispersive.p_values {
                let (r, _) = verify_lp_interpolation(spec, p, &t_grid, cfg.dispersive.gaussian_width, tol.slope)?;
                push(&mut reports, &mut pass, &r)?;
            }
        }
        Check::Ode => {
            for &lambda in &cfg.ode.lambda {
                let r = verify_mode_ode(spec.alpha.get(), lambda, &cfg.ode.t)?;
                pass &= r.pass;
                reports.push(serde_json::to_value(&r)?);
            }
        }
        Check::Lemma31 => {
            if spec.alpha.get() == 1.0 {
                bail!("the full kernel is not available for α = 1");
            }
            // the scaling identity on a fixed grid of (t, η = x t^{−α/β})
            let mut worst: f64 = 0.0;
            let mut cells = 0;
            for &t in &t_grid {
                for eta in log_grid(1e-2, 10.0, 5) {
                    worst = worst.max(scaling_defect(spec, t, eta * t.powf(spec.alpha.get() / spec.beta))?);
                    cells += 1;
                }
            }
            let mut r = CheckReport::new("lemma31-scaling")
                .with_spec(&spec)
                .param("max_defect", worst)
                .param("cells", cells as f64);
            r.metrics.tolerance = Some(tol.scaling_defect);
            r.pass = worst <= tol.scaling_defect;
            push(&mut reports, &mut pass, &r)?;
            if spec.beta < spec.n as f64 {
                let etas = log_grid(1e-3, 1e-1, 9);
                let r = check_expansion(spec, g.t_fixed, &etas, tol.max_spread, tol.expansion_gain)?;
                push(&mut reports, &mut pass, &r)?;
            }
            if spec.n == 2 {
                push(&mut reports, &mut pass, &check_w1_log(2, 1e-3, 1e-5, tol.w1_change)?)?;
            }
        }
    }
    Ok(VerifyDocument { check, pass, reports, config: cfg.to_toml()? })
}

/// `{"error": …}`, the machine-readable failure record.
pub fn error_record(err: &anyhow::Error) -> Value {
    json!({ "error": format!("{err:#}") })
}
