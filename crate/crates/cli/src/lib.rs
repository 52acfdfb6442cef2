//! Library side of the `tfse` binary: configuration, the verification
//! driver and the text producers behind each subcommand. Every producer
//! returns its output as a string so runs are byte-for-byte reproducible.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod verify;

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use tfse_core::besov::{besov_norm, besov_norm_spectrum, write_besov_csv, BesovNorm, BesovSpec, Spectrum};
use tfse_core::estimates::{decay_sweep, fit_exponent, read_sweep_csv, write_sweep_csv, FitResult, SweepRecord, ASYMPTOTIC_THRESHOLD};
use tfse_core::freq::{fmt17, uniform_grid, CutoffProfile, RadialProfile};
use tfse_core::kernel::{BandKernel, FullKernel, KernelSpec, KERNEL_CSV_HEADER};
use tfse_core::specfun::{bessel_j, ml_eval, EvalDiagnostics, MLOrder};

use config::RunConfig;

fn method_name(d: &EvalDiagnostics) -> String {
    serde_json::to_value(d.method).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

/// Parses `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let (re, im) = s.split_once(',').with_context(|| format!("expected `re,im`, got `{s}`"))?;
    Ok(Complex64::new(re.trim().parse()?, im.trim().parse()?))
}

pub fn ml(alpha: f64, z: Complex64) -> Result<String> {
    let (v, d) = ml_eval(MLOrder::new(alpha)?, z)?;
    Ok(format!(
        "alpha,re_z,im_z,re,im,method,terms,est_error\n{},{},{},{},{},{},{},{}\n",
        fmt17(alpha),
        fmt17(z.re),
        fmt17(z.im),
        fmt17(v.re),
        fmt17(v.im),
        method_name(&d),
        d.terms_or_nodes,
        fmt17(d.est_error)
    ))
}

pub fn bessel(nu: f64, x: f64) -> Result<String> {
    let (v, d) = bessel_j(nu, x)?;
    Ok(format!(
        "nu,x,value,method,terms,est_error\n{},{},{},{},{},{}\n",
        fmt17(nu),
        fmt17(x),
        fmt17(v),
        method_name(&d),
        d.terms_or_nodes,
        fmt17(d.est_error)
    ))
}

/// Kernel profile CSV plus the number of failed cells. `nn = None` is the
/// full kernel. A failed cell is written with NaN values.
pub fn kernel(spec: KernelSpec, t: f64, nn: Option<f64>, xs: &[f64]) -> Result<(String, usize)> {
    enum K {
        Band(BandKernel),
        Full(FullKernel),
    }
    let k = match nn {
        Some(nn) => K::Band(BandKernel::new(spec, t, tfse_core::estimates::dyadic(nn)?)?),
        None => K::Full(FullKernel::new(spec, t)?),
    };
    let mut out = format!("{KERNEL_CSV_HEADER}\n");
    let mut failed = 0;
    let n_col = nn.map(fmt17).unwrap_or_else(|| "inf".into());
    for &x in xs {
        let s = match &k {
            K::Band(b) => b.at(x),
            K::Full(f) => f.at(x),
        };
        match s {
            Ok(s) => writeln!(out, "{}", s.csv_row())?,
            Err(_) => {
                failed += 1;
                writeln!(out, "{},{n_col},{},NaN,NaN,NaN,0,NaN", fmt17(t), fmt17(x))?;
            }
        }
    }
    Ok((out, failed))
}

/// `x` grid `[x_min, x_max]` with `points` uniform entries.
pub fn x_range(x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(x_min >= 0.0 && x_min <= x_max && x_max.is_finite()) || points == 0 {
        bail!("x range needs 0 <= x_min <= x_max and at least one point");
    }
    Ok(if points == 1 { vec![x_min] } else { uniform_grid(x_min, x_max, points) })
}

pub fn sweep(cfg: &RunConfig) -> Result<(String, Vec<SweepRecord>)> {
    let records = decay_sweep(cfg.kernel_spec()?, &cfg.t_grid(), &cfg.grid.n_values, cfg.grid.x_points)?;
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &records)?;
    Ok((String::from_utf8(buf)?, records))
}

/// Which sweep column is the abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    T,
    N,
}

/// Ok, asymptotic cells grouped by the other axis, in input order.
fn groups(records: &[SweepRecord], axis: Axis) -> Vec<(f64, Vec<(f64, f64)>)> {
    let mut out: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for r in records.iter().filter(|r| r.ok() && r.sup_k > 0.0 && r.t_alpha_n_beta >= ASYMPTOTIC_THRESHOLD) {
        let (key, x) = match axis {
            Axis::T => (r.n_scale, r.t),
            Axis::N => (r.t, r.n_scale),
        };
        match out.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.1.push((x, r.sup_k)),
            None => out.push((key, vec![(x, r.sup_k)])),
        }
    }
    out
}

#[derive(Debug, serde::Serialize)]
pub struct GroupFit {
    /// The fixed `N` (for a fit in `t`) or `t` (for a fit in `N`).
    pub fixed: f64,
    pub fit: FitResult,
}

/// Power-law fits of `sup_K` along `axis` for every fixed value of the other.
pub fn fit(sweep_csv: &str, axis: Axis) -> Result<Vec<GroupFit>> {
    let records = read_sweep_csv(sweep_csv)?;
    if records.is_empty() {
        bail!("the sweep has no cells");
    }
    let fits: Vec<GroupFit> = groups(&records, axis)
        .into_iter()
        .filter_map(|(fixed, pts)| fit_exponent(&pts).ok().map(|fit| GroupFit { fixed, fit }))
        .collect();
    if fits.is_empty() {
        bail!("no group has three asymptotic cells to fit");
    }
    Ok(fits)
}

/// `(log-log data, fitted lines)` as two CSV texts.
pub fn plotdata(sweep_csv: &str, axis: Axis) -> Result<(String, String)> {
    let records = read_sweep_csv(sweep_csv)?;
    if records.is_empty() {
        bail!("the sweep has no cells");
    }
    let (fixed, var) = match axis {
        Axis::T => ("N", "t"),
        Axis::N => ("t", "N"),
    };
    let mut data = format!("{fixed},log10_{var},log10_sup_K\n");
    let mut lines = format!("{fixed},log10_{var},log10_fit,slope\n");
    for (key, pts) in groups(&records, axis) {
        for &(x, y) in &pts {
            writeln!(data, "{},{},{}", fmt17(key), fmt17(x.log10()), fmt17(y.log10()))?;
        }
        if let Ok(f) = fit_exponent(&pts) {
            for &(x, _) in &pts {
                // ln y = a + b ln x  ⇒  log10 y = (a + b ln x)/ln 10
                let lf = (f.intercept + f.slope * x.ln()) / std::f64::consts::LN_10;
                writeln!(lines, "{},{},{},{}", fmt17(key), fmt17(x.log10()), fmt17(lf), fmt17(f.slope))?;
            }
        }
    }
    Ok((data, lines))
}

/// Where the Besov command takes its function from.
pub enum BesovInput {
    Profile(RadialProfile),
    Gaussian { n: u32, width: f64 },
}

pub fn besov(input: &BesovInput, spec: &BesovSpec) -> Result<BesovNorm> {
    Ok(match input {
        BesovInput::Profile(p) => besov_norm(p, spec)?,
        BesovInput::Gaussian { n, width } => besov_norm_spectrum(&Spectrum::gaussian(*n, *width)?, spec, &CutoffProfile::default())?,
    })
}

pub fn besov_csv(norm: &BesovNorm) -> Result<String> {
    let mut buf = Vec::new();
    write_besov_csv(&mut buf, &norm.blocks)?;
    Ok(String::from_utf8(buf)?)
}
