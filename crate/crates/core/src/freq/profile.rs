//! Sampled radial profiles, grids and their CSV form.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad::integrate_samples;
use crate::specfun::gamma_real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    Uniform,
    LogUniform,
    Composite,
}

impl GridKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GridKind::Uniform => "uniform",
            GridKind::LogUniform => "log-uniform",
            GridKind::Composite => "composite",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GridKind::Uniform),
            "log-uniform" => Ok(GridKind::LogUniform),
            "composite" => Ok(GridKind::Composite),
            _ => Err(Error::Parse(format!("unknown grid kind {s:?}"))),
        }
    }
}

/// `m` points spaced uniformly on `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    assert!(m >= 2 && b > a);
    let h = (b - a) / (m - 1) as f64;
    (0..m).map(|i| if i == m - 1 { b } else { a + i as f64 * h }).collect()
}

/// `m` points spaced uniformly in `ln r` on `[a, b]`, `0 < a < b`.
pub fn log_grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    assert!(m >= 2 && a > 0.0 && b > a);
    let (la, lb) = (a.ln(), b.ln());
    let h = (lb - la) / (m - 1) as f64;
    (0..m).map(|i| if i == m - 1 { b } else { (la + i as f64 * h).exp() }).collect()
}

/// Default radius grid: 4096 log-uniform points on `[1e-4, 1e4]`.
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-4, 1e4, 4096)
}

/// `{0}` followed by a log-uniform grid on `[a, b]`.
pub fn origin_log_grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(m + 1);
    g.push(0.0);
    g.extend(log_grid(a, b, m));
    g
}

/// Surface measure `σ_{n−1} = 2 π^{n/2} / Γ(n/2)` of the unit sphere in `ℝ^n`.
pub fn sphere_area(n: u32) -> f64 {
    2.0 * std::f64::consts::PI.powf(0.5 * n as f64) / gamma_real(0.5 * n as f64).expect("n >= 1")
}

/// Complex values on a strictly increasing radius grid in `ℝ^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    n: u32,
    radii: Vec<f64>,
    values: Vec<Complex64>,
    grid_kind: GridKind,
}

impl RadialProfile {
    pub fn new(n: u32, radii: Vec<f64>, values: Vec<Complex64>, grid_kind: GridKind) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if radii.is_empty() || radii.len() != values.len() {
            return Err(invalid("radii and values must be nonempty and of equal length"));
        }
        if radii[0] < 0.0 || radii.iter().any(|r| !r.is_finite()) {
            return Err(invalid("radii must be finite and nonnegative"));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("radii must be strictly increasing"));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("profile values must be finite"));
        }
        Ok(RadialProfile { n, radii, values, grid_kind })
    }

    /// Samples `f` on `radii`.
    pub fn from_fn(n: u32, radii: Vec<f64>, grid_kind: GridKind, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = radii.iter().map(|&r| f(r)).collect();
        RadialProfile::new(n, radii, values, grid_kind)
    }

    pub fn zeros(n: u32, radii: Vec<f64>, grid_kind: GridKind) -> Result<Self> {
        let values = vec![Complex64::new(0.0, 0.0); radii.len()];
        RadialProfile::new(n, radii, values, grid_kind)
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn grid_kind(&self) -> GridKind {
        self.grid_kind
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> RadialProfile {
        RadialProfile { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    /// Pointwise sum; grids must coincide.
    pub fn add(&self, other: &RadialProfile) -> Result<RadialProfile> {
        if self.radii != other.radii || self.n != other.n {
            return Err(invalid("profiles live on different grids"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(RadialProfile { values, ..self.clone() })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Writes `# n=…,grid_kind=…`, a `r,re,im` header and one row per sample,
    /// 17 significant digits, LF line endings.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# n={},grid_kind={}", self.n, self.grid_kind.as_str())?;
        writeln!(w, "r,re,im")?;
        let mut line = String::new();
        for (r, v) in self.radii.iter().zip(&self.values) {
            line.clear();
            let _ = writeln!(line, "{},{},{}", fmt17(*r), fmt17(v.re), fmt17(v.im));
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<RadialProfile> {
        let mut lines = r.lines();
        let meta = next_line(&mut lines)?;
        let meta = meta
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("missing '# n=…,grid_kind=…' line".into()))?;
        let mut n = None;
        let mut kind = None;
        for kv in meta.trim().split(',') {
            match kv.split_once('=') {
                Some(("n", v)) => n = Some(v.trim().parse::<u32>().map_err(|e| Error::Parse(e.to_string()))?),
                Some(("grid_kind", v)) => kind = Some(GridKind::parse(v.trim())?),
                _ => return Err(Error::Parse(format!("unexpected metadata {kv:?}"))),
            }
        }
        let header = next_line(&mut lines)?;
        if header.trim() != "r,re,im" {
            return Err(Error::Parse(format!("expected header r,re,im, got {header:?}")));
        }
        let mut radii = Vec::new();
        let mut values = Vec::new();
        for line in lines {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("expected 3 columns, got {line:?}")));
            }
            let p = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
            radii.push(p(cols[0])?);
            values.push(Complex64::new(p(cols[1])?, p(cols[2])?));
        }
        let n = n.ok_or_else(|| Error::Parse("missing n".into()))?;
        let kind = kind.ok_or_else(|| Error::Parse("missing grid_kind".into()))?;
        RadialProfile::new(n, radii, values, kind)
    }
}

fn next_line<B: BufRead>(lines: &mut std::io::Lines<B>) -> Result<String> {
    lines
        .next()
        .ok_or_else(|| Error::Parse("unexpected end of input".into()))?
        .map_err(|e| Error::Parse(e.to_string()))
}

/// 17 significant digits in scientific notation (lossless for f64).
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Result of an `L^p` norm computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpNorm {
    pub value: f64,
    /// `|f|` at the outermost radius relative to `max |f|`; large values mean
    /// the grid does not cover the numerical support.
    pub boundary_ratio: f64,
}

impl LpNorm {
    pub fn truncated(&self, tol: f64) -> bool {
        self.boundary_ratio > tol
    }
}

/// `(σ_{n−1} ∫ |f|^p r^{n−1} dr)^{1/p}`, or `max |f|` for `p = ∞`.
///
/// The gap between the origin and the first radius is filled with the first
/// sample value.
pub fn lp_norm_radial(f: &RadialProfile, p: f64) -> Result<LpNorm> {
    if !(p >= 1.0) {
        return Err(invalid(format!("p must be in [1, ∞], got {p}")));
    }
    let max = f.max_abs();
    let last = f.values.last().map(|v| v.norm()).unwrap_or(0.0);
    let boundary_ratio = if max > 0.0 { last / max } else { 0.0 };
    if p.is_infinite() {
        return Ok(LpNorm { value: max, boundary_ratio });
    }
    let n = f.n as i32;
    let y: Vec<f64> = f
        .radii
        .iter()
        .zip(&f.values)
        .map(|(r, v)| v.norm().powf(p) * r.powi(n - 1))
        .collect();
    let mut integral = integrate_samples(&f.radii, &y);
    let r0 = f.radii[0];
    if r0 > 0.0 {
        integral += f.values[0].norm().powf(p) * r0.powi(n) / n as f64;
    }
    Ok(LpNorm { value: (sphere_area(f.n) * integral).powf(1.0 / p), boundary_ratio })
}
