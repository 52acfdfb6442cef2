//! Decay sweeps, power-law fits and the checks built on them.
//!
//! Every check returns a [`CheckReport`]; sweeps are parallel over cells but
//! reduced in input order, so reports are reproducible bit for bit.

mod caputo;
mod dispersive;

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::freq::{fmt17, log_grid, DyadicBand};
use crate::kernel::{default_x_grid, expansion_residual, kernel_full, w1_eval, BandKernel, FullKernel, KernelSpec, Regime};

pub use caputo::{caputo_derivative, verify_mode_ode, ModeOdeReport};
pub use dispersive::{
    lp_exponent_fixed, verify_band_linfty, verify_dispersive_besov, verify_lp_interpolation, BesovVariant, DispersiveCheck,
    DispersiveOptions, InequalityReport,
};

/// Cells with `t^α N^β` below this are pre-asymptotic.
pub const ASYMPTOTIC_THRESHOLD: f64 = 10.0;
pub const DEFAULT_X_POINTS: usize = 512;

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Largest `|ln y − fit|`.
    pub residual_max: f64,
}

pub fn fit_exponent(samples: &[(f64, f64)]) -> Result<FitResult> {
    if samples.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 samples, got {}", samples.len())));
    }
    if let Some(&(x, y)) = samples.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::DegenerateFit(format!("samples must be positive and finite, got ({x}, {y})")));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 1e-28 * mx.abs().max(1.0).powi(2) {
        return Err(Error::DegenerateFit("all parameters are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_max = pts.iter().map(|p| (p.1 - intercept - slope * p.0).abs()).fold(0.0, f64::max);
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    // a constant series is fitted exactly
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(FitResult { slope, intercept, r_squared, n_points: pts.len(), residual_max })
}

/// The band `N = 2^j`; `N` must be an exact power of two.
pub fn dyadic(nn: f64) -> Result<DyadicBand> {
    let j = nn.log2().round();
    if !(nn > 0.0) || 2f64.powi(j as i32) != nn {
        return Err(invalid(format!("N must be a power of two, got {nn}")));
    }
    Ok(DyadicBand::new(j as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Failed,
}

/// One `(t, N)` cell of a decay sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub t: f64,
    #[serde(rename = "N")]
    pub n_scale: f64,
    pub sup_k: f64,
    pub x_star: f64,
    pub t_alpha_n_beta: f64,
    pub status: CellStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn ok(&self) -> bool {
        self.status == CellStatus::Ok
    }
}

pub const SWEEP_CSV_HEADER: &str = "t,N,x_star,sup_K,t_alpha_N_beta,status";

pub fn write_sweep_csv<W: Write>(mut w: W, records: &[SweepRecord]) -> std::io::Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in records {
        let status = match r.status {
            CellStatus::Ok => "ok",
            CellStatus::Failed => "failed",
        };
        writeln!(w, "{},{},{},{},{},{status}", fmt17(r.t), fmt17(r.n_scale), fmt17(r.x_star), fmt17(r.sup_k), fmt17(r.t_alpha_n_beta))?;
    }
    Ok(())
}

pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(SWEEP_CSV_HEADER) {
        return Err(Error::Parse(format!("sweep CSV must start with `{SWEEP_CSV_HEADER}`")));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.trim().split(',').collect();
        if cols.len() != 6 {
            return Err(Error::Parse(format!("line {}: expected 6 columns", i + 2)));
        }
        let num = |k: usize| cols[k].parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)));
        let status = match cols[5] {
            "ok" => CellStatus::Ok,
            "failed" => CellStatus::Failed,
            s => return Err(Error::Parse(format!("line {}: unknown status {s}", i + 2))),
        };
        out.push(SweepRecord {
            t: num(0)?,
            n_scale: num(1)?,
            x_star: num(2)?,
            sup_k: num(3)?,
            t_alpha_n_beta: num(4)?,
            status,
            error: None,
        });
    }
    Ok(out)
}

/// `sup_x |K_t^N(x)|` on [`default_x_grid`] for every `(t, N)`, `t` outer.
/// A cell whose quadrature fails is flagged, not fatal.
pub fn decay_sweep(spec: KernelSpec, t_grid: &[f64], n_grid: &[f64], x_points: usize) -> Result<Vec<SweepRecord>> {
    let bands = n_grid.iter().map(|&nn| dyadic(nn)).collect::<Result<Vec<_>>>()?;
    if t_grid.is_empty() || bands.is_empty() {
        return Err(invalid("sweep grids must be nonempty"));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(invalid(format!("times must be finite and >= 0, got {t}")));
    }
    let cells: Vec<(f64, DyadicBand)> = t_grid.iter().flat_map(|&t| bands.iter().map(move |&b| (t, b))).collect();
    let (alpha, beta) = (spec.alpha.get(), spec.beta);
    Ok(crate::par_map(&cells, |&(t, band)| {
        let nn = band.scale();
        let s = t.powf(alpha) * nn.powf(beta);
        let res = BandKernel::new(spec, t, band).and_then(|k| k.sup(&default_x_grid(band, x_points)));
        match res {
            Ok((x_star, sup_k)) => SweepRecord { t, n_scale: nn, sup_k, x_star, t_alpha_n_beta: s, status: CellStatus::Ok, error: None },
            Err(e) => SweepRecord {
                t,
                n_scale: nn,
                sup_k: f64::NAN,
                x_star: f64::NAN,
                t_alpha_n_beta: s,
                status: CellStatus::Failed,
                error: Some(e.to_string()),
            },
        }
    }))
}

/// A report parameter: numbers and labels. Non-finite numbers become labels
/// (`"inf"`, `"NaN"`) since JSON has no literal for them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Num(f64),
    Text(String),
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            ParamValue::Num(v)
        } else {
            ParamValue::Text(v.to_string())
        }
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub slope: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub r_squared: Option<f64>,
    pub ratio_spread: Option<f64>,
}

/// Outcome of one check; `params` carries inputs and secondary measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub params: BTreeMap<String, ParamValue>,
    pub pass: bool,
    pub metrics: Metrics,
    pub cells_excluded: usize,
}

impl CheckReport {
    pub fn new(check: &str) -> Self {
        CheckReport { check: check.into(), params: BTreeMap::new(), pass: false, metrics: Metrics::default(), cells_excluded: 0 }
    }

    pub fn param(mut self, key: &str, v: impl Into<ParamValue>) -> Self {
        self.params.insert(key.into(), v.into());
        self
    }

    pub fn with_spec(self, spec: &KernelSpec) -> Self {
        self.param("n", spec.n as f64).param("alpha", spec.alpha.get()).param("beta", spec.beta)
    }

    /// Record a fit against `expected ± tolerance`; passes iff within it.
    fn with_fit(mut self, fit: &FitResult, expected: f64, tolerance: f64) -> Self {
        self.metrics.slope = Some(fit.slope);
        self.metrics.expected = Some(expected);
        self.metrics.tolerance = Some(tolerance);
        self.metrics.r_squared = Some(fit.r_squared);
        self.pass = (fit.slope - expected).abs() <= tolerance;
        self
    }

    /// One line: `check PASS|FAIL key=value ...`.
    pub fn summary(&self) -> String {
        let mut s = format!("{} {}", self.check, if self.pass { "PASS" } else { "FAIL" });
        let m = &self.metrics;
        for (k, v) in [("slope", m.slope), ("expected", m.expected), ("tol", m.tolerance), ("r2", m.r_squared), ("spread", m.ratio_spread)] {
            if let Some(v) = v {
                s.push_str(&format!(" {k}={v:.6}"));
            }
        }
        if self.cells_excluded > 0 {
            s.push_str(&format!(" excluded={}", self.cells_excluded));
        }
        s
    }
}

fn failed_report(check: &str, spec: &KernelSpec, err: &Error) -> CheckReport {
    CheckReport::new(check).with_spec(spec).param("error", err.to_string())
}

/// Fit `ln sup_K` against `ln t` (or `ln N`), using ok cells in the
/// asymptotic regime only.
fn sweep_fit(records: &[SweepRecord], by_n: bool) -> (Result<FitResult>, usize) {
    let mut excluded = 0;
    let mut pts = Vec::new();
    for r in records {
        if r.ok() && r.t_alpha_n_beta >= ASYMPTOTIC_THRESHOLD && r.sup_k > 0.0 {
            pts.push((if by_n { r.n_scale } else { r.t }, r.sup_k));
        } else {
            excluded += 1;
        }
    }
    (fit_exponent(&pts), excluded)
}

/// `sup |K_t^N| ∝ t^{−α}` at fixed `N`, with `R² ≥ min_r2`.
pub fn check_t_decay(spec: KernelSpec, nn: f64, t_grid: &[f64], x_points: usize, tol: f64, min_r2: f64) -> Result<(CheckReport, Vec<SweepRecord>)> {
    let records = decay_sweep(spec, t_grid, &[nn], x_points)?;
    let (fit, excluded) = sweep_fit(&records, false);
    let base = CheckReport::new("thm12-t-decay").with_spec(&spec).param("N", nn);
    let mut rep = match fit {
        Ok(f) => {
            let mut r = base.with_fit(&f, -spec.alpha.get(), tol);
            r.pass &= f.r_squared >= min_r2;
            r.param("min_r_squared", min_r2)
        }
        Err(e) => base.param("error", e.to_string()),
    };
    rep.cells_excluded = excluded;
    Ok((rep, records))
}

/// `sup |K_t^N| ∝ N^{n−β}` at fixed `t`.
pub fn check_n_scaling(spec: KernelSpec, t: f64, n_grid: &[f64], x_points: usize, tol: f64) -> Result<(CheckReport, Vec<SweepRecord>)> {
    let records = decay_sweep(spec, &[t], n_grid, x_points)?;
    let (fit, excluded) = sweep_fit(&records, true);
    let base = CheckReport::new("thm12-n-scaling").with_spec(&spec).param("t", t);
    let mut rep = match fit {
        Ok(f) => base.with_fit(&f, spec.n as f64 - spec.beta, tol),
        Err(e) => base.param("error", e.to_string()),
    };
    rep.cells_excluded = excluded;
    Ok((rep, records))
}

/// `sup_x |K_t(x)| ∝ t^{−nα/β}` for `β > n`. The sup is taken over
/// `x ∈ {0} ∪ t^{α/β}·[1e-3, 1e2]`, which follows the kernel's self-similar scale.
pub fn check_full_decay(spec: KernelSpec, t_grid: &[f64], x_points: usize, tol: f64) -> Result<(CheckReport, Vec<(f64, f64)>)> {
    if spec.regime() != Regime::Subcritical {
        return Err(invalid("the full-kernel sup is finite only for β > n"));
    }
    let (alpha, beta) = (spec.alpha.get(), spec.beta);
    let mut eta = vec![0.0];
    eta.extend(log_grid(1e-3, 1e2, x_points));
    let mut sups = Vec::new();
    let mut excluded = 0;
    for &t in t_grid {
        let scale = t.powf(alpha / beta);
        let xs: Vec<f64> = eta.iter().map(|e| e * scale).collect();
        match FullKernel::new(spec, t).and_then(|k| k.sup(&xs)) {
            Ok((_, v)) => sups.push((t, v)),
            Err(_) => excluded += 1,
        }
    }
    let base = CheckReport::new("thm12-full-decay").with_spec(&spec);
    let mut rep = match fit_exponent(&sups) {
        Ok(f) => base.with_fit(&f, -spec.decay_power(), tol),
        Err(e) => base.param("error", e.to_string()),
    };
    rep.cells_excluded = excluded;
    Ok((rep, sups))
}

/// `c(t, N) = sup_K (1 + t^α N^β) / N^n` over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub cells: Vec<(f64, f64, f64)>,
    pub c_min: f64,
    pub c_max: f64,
    pub spread: f64,
    pub pass: bool,
    pub records: Vec<SweepRecord>,
}

impl SharpnessReport {
    pub fn report(&self, spec: &KernelSpec, max_spread: f64) -> CheckReport {
        let mut r = CheckReport::new("sharpness")
            .with_spec(spec)
            .param("c_min", self.c_min)
            .param("c_max", self.c_max)
            .param("max_spread", max_spread);
        r.metrics.ratio_spread = Some(self.spread);
        r.pass = self.pass;
        r.cells_excluded = self.records.iter().filter(|c| !c.ok()).count();
        r
    }
}

/// Cells with `t^α N^β < 1` are outside the lower bound's range and skipped.
pub fn verify_sharpness(spec: KernelSpec, t_grid: &[f64], n_grid: &[f64], x_points: usize, max_spread: f64) -> Result<SharpnessReport> {
    let records = decay_sweep(spec, t_grid, n_grid, x_points)?;
    let nf = spec.n as f64;
    let cells: Vec<(f64, f64, f64)> = records
        .iter()
        .filter(|r| r.ok() && r.t_alpha_n_beta >= 1.0)
        .map(|r| (r.t, r.n_scale, r.sup_k * (1.0 + r.t_alpha_n_beta) / r.n_scale.powf(nf)))
        .collect();
    let c_min = cells.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let c_max = cells.iter().map(|c| c.2).fold(0.0, f64::max);
    let spread = c_max / c_min;
    let pass = !cells.is_empty() && c_min > 0.0 && spread <= max_spread && records.iter().all(|r| r.ok());
    Ok(SharpnessReport { cells, c_min, c_max, spread, pass, records })
}

/// `|K_t(x) − t^{−nα/β} K_1(x t^{−α/β})| / |K_t(x)|`.
pub fn scaling_defect(spec: KernelSpec, t: f64, x: f64) -> Result<f64> {
    let a = kernel_full(spec, t, x)?.value;
    let b = kernel_full(spec, 1.0, x * t.powf(-spec.alpha.get() / spec.beta))?.value * t.powf(-spec.decay_power());
    Ok((a - b).norm() / a.norm())
}

/// The subtracted expansion at fixed `t` over `η = x t^{−α/β}`: the residual
/// stays within `max_spread`, and at the smallest `η` it is at least `gain`
/// times below the unsubtracted `|K_t| t^{nα/β}`.
pub fn check_expansion(spec: KernelSpec, t: f64, etas: &[f64], max_spread: f64, gain: f64) -> Result<CheckReport> {
    if etas.is_empty() {
        return Err(invalid("need at least one η"));
    }
    let scale = t.powf(spec.alpha.get() / spec.beta);
    let res: Vec<Result<f64>> = crate::par_map(etas, |&e| expansion_residual(spec, t, e * scale));
    let res = match res.into_iter().collect::<Result<Vec<f64>>>() {
        Ok(r) => r,
        Err(e) => return Ok(failed_report("lemma31-expansion", &spec, &e)),
    };
    let (i0, &e0) = etas.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let raw = kernel_full(spec, t, e0 * scale)?.value.norm() * t.powf(spec.decay_power());
    let hi = res.iter().cloned().fold(0.0, f64::max);
    let lo = res.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = hi / lo;
    let reduction = raw / res[i0];
    let mut r = CheckReport::new("lemma31-expansion")
        .with_spec(&spec)
        .param("t", t)
        .param("eta_min", e0)
        .param("residual_min", lo)
        .param("residual_max", hi)
        .param("unsubtracted_at_eta_min", raw)
        .param("reduction", reduction)
        .param("min_reduction", gain)
        .param("max_spread", max_spread);
    r.metrics.ratio_spread = Some(spread);
    r.pass = lo > 0.0 && spread <= max_spread && reduction >= gain;
    Ok(r)
}

/// `W_1(η)/ln(1/η)` agrees at the two `η` to within `tol` (relative).
pub fn check_w1_log(n: u32, eta_a: f64, eta_b: f64, tol: f64) -> Result<CheckReport> {
    let ra = w1_eval(n, eta_a)?.re / (1.0 / eta_a).ln();
    let rb = w1_eval(n, eta_b)?.re / (1.0 / eta_b).ln();
    let dev = (ra / rb - 1.0).abs();
    let mut r = CheckReport::new("lemma31-w1")
        .param("n", n as f64)
        .param("eta_a", eta_a)
        .param("eta_b", eta_b)
        .param("ratio_a", ra)
        .param("ratio_b", rb)
        .param("relative_change", dev);
    r.metrics.tolerance = Some(tol);
    r.metrics.ratio_spread = Some(ra.max(rb) / ra.min(rb));
    r.pass = ra > 0.0 && rb > 0.0 && dev <= tol;
    Ok(r)
}
