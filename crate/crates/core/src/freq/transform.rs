//! Radial Fourier transforms.
//!
//! With the symmetric convention `f̂(ξ) = (2π)^{-n/2} ∫ e^{-ix·ξ} f(x) dx` a
//! radial function transforms as
//!
//! ```text
//! f̂(ρ) = ∫_0^∞ f(r) r^{n−1} Ω_n(rρ) dr,    Ω_n(s) = s^{−(n−2)/2} J_{(n−2)/2}(s),
//! ```
//!
//! and the map is its own inverse. Integrals are summed on Gauss-Legendre
//! panels no wider than `min(h, π/ρ)`; the panel count is doubled until two
//! successive sums agree to `tol` relative to the integrand's `L¹` mass.

use std::sync::OnceLock;

use num_complex::Complex64;

use super::cutoff::{CutoffProfile, DyadicBand};
use super::profile::{GridKind, RadialProfile};
use super::spline::ComplexSpline;
use crate::error::{Error, Result};
use crate::par_map;
use crate::quad::{gauss_legendre, graded_rule};
use crate::specfun::{omega_at_zero, omega_n};

const GL_ORDER: usize = 16;
const MAX_LEVEL: usize = 14;
/// Default agreement between successive panel doublings.
pub const DEFAULT_TOL: f64 = 1e-8;

struct Level {
    r: Vec<f64>,
    /// `weight · f(r) · r^{n−1}`
    wv: Vec<Complex64>,
    mass: f64,
}

/// A radial integrand `f(r)` on `[breaks[0], breaks.last()]`, sampled lazily
/// at Gauss-Legendre nodes, one cached node set per refinement level.
pub struct RadialDensity<'a> {
    n: u32,
    f: Box<dyn Fn(f64) -> Complex64 + Send + Sync + 'a>,
    breaks: Vec<f64>,
    h_smooth: f64,
    graded_origin: bool,
    floor: f64,
    levels: Vec<OnceLock<Level>>,
}

/// Value of a transform at one radius with its quadrature record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: Complex64,
    pub nodes: usize,
    pub est_error: f64,
}

impl<'a> RadialDensity<'a> {
    /// `breaks` must be increasing; `f` is only sampled strictly inside the
    /// intervals. `graded_origin` grades the first panel geometrically when
    /// `f` is not smooth at `r = 0` (e.g. contains `r^β`).
    pub fn new(
        n: u32,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'a,
        breaks: Vec<f64>,
        h_smooth: f64,
        graded_origin: bool,
    ) -> Self {
        assert!(breaks.len() >= 2 && breaks.windows(2).all(|w| w[1] > w[0]), "breakpoints must increase");
        assert!(h_smooth > 0.0);
        RadialDensity {
            n,
            f: Box::new(f),
            breaks,
            h_smooth,
            graded_origin,
            floor: 0.0,
            levels: (0..=MAX_LEVEL + 1).map(|_| OnceLock::new()).collect(),
        }
    }

    /// Absolute error below which two panel levels count as agreeing, for
    /// integrands that are rounding noise relative to some outer scale.
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor.max(0.0);
        self
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    /// `Ω_n(0) ∫ |f| r^{n−1} dr` at the coarsest level; bounds every transform value.
    pub fn mass(&self) -> f64 {
        self.level(0).mass
    }

    fn level(&self, l: usize) -> &Level {
        self.levels[l].get_or_init(|| self.build_level(l))
    }

    fn build_level(&self, l: usize) -> Level {
        let width = self.h_smooth * 0.5f64.powi(l as i32);
        let (xs, ws) = gauss_legendre(GL_ORDER);
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for (k, win) in self.breaks.windows(2).enumerate() {
            let (a, b) = (win[0], win[1]);
            let panels = (((b - a) / width).ceil() as usize).max(1);
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                let lo = a + p as f64 * h;
                if k == 0 && p == 0 && a == 0.0 && self.graded_origin {
                    pts.extend(graded_rule(h, 0.15, 24, GL_ORDER));
                    continue;
                }
                let c = lo + 0.5 * h;
                for (&x, &w) in xs.iter().zip(ws) {
                    pts.push((c + 0.5 * h * x, 0.5 * h * w));
                }
            }
        }
        let nm1 = self.n as i32 - 1;
        let mut r = Vec::with_capacity(pts.len());
        let mut wv = Vec::with_capacity(pts.len());
        let mut mass = 0.0;
        for (x, w) in pts {
            let v = (self.f)(x) * (w * x.powi(nm1));
            mass += v.norm();
            r.push(x);
            wv.push(v);
        }
        Level { r, wv, mass: mass * omega_at_zero(self.n) }
    }

    fn sum_level(&self, l: usize, rho: f64) -> (Complex64, usize, f64) {
        let lv = self.level(l);
        let mut s = Complex64::new(0.0, 0.0);
        for (&r, &v) in lv.r.iter().zip(&lv.wv) {
            s += v * omega_n(self.n, r * rho);
        }
        (s, lv.r.len(), lv.mass)
    }

    /// `∫ f(r) r^{n−1} Ω_n(rρ) dr`.
    pub fn hankel(&self, rho: f64, tol: f64) -> Result<TransformValue> {
        let rho = rho.abs();
        let need = self.h_smooth * rho / std::f64::consts::PI;
        let mut l = if need <= 1.0 { 0 } else { need.log2().ceil() as usize };
        if l >= MAX_LEVEL {
            return Err(Error::Quadrature(format!("output radius {rho} needs more than {MAX_LEVEL} panel doublings")));
        }
        let (mut prev, mut nodes, _) = self.sum_level(l, rho);
        loop {
            l += 1;
            let (cur, m, mass) = self.sum_level(l, rho);
            nodes += m;
            let diff = (cur - prev).norm();
            if !cur.re.is_finite() || !cur.im.is_finite() {
                return Err(Error::Quadrature(format!("non-finite integrand at rho = {rho}")));
            }
            if diff <= (tol * mass).max(self.floor).max(f64::MIN_POSITIVE) || mass == 0.0 {
                return Ok(TransformValue { value: cur, nodes, est_error: diff });
            }
            if l >= MAX_LEVEL {
                return Err(Error::Quadrature(format!(
                    "panel doubling did not converge at rho = {rho}: change {diff:e}, mass {mass:e}"
                )));
            }
            prev = cur;
        }
    }

    /// Transform on `out_radii`; each radius is independent (parallel when enabled).
    pub fn transform(&self, out_radii: &[f64], tol: f64) -> Result<Vec<TransformValue>> {
        par_map(out_radii, |&rho| self.hankel(rho, tol)).into_iter().collect()
    }

    /// Transform as a profile on `out_radii`.
    pub fn transform_profile(&self, out_radii: &[f64], tol: f64) -> Result<RadialProfile> {
        let vals = self.transform(out_radii, tol)?;
        RadialProfile::new(
            self.n,
            out_radii.to_vec(),
            vals.into_iter().map(|v| v.value).collect(),
            classify_grid(out_radii),
        )
    }
}

/// Recognises uniform and log-uniform grids; anything else is composite.
pub fn classify_grid(r: &[f64]) -> GridKind {
    if r.len() < 3 {
        return GridKind::Composite;
    }
    let d0 = r[1] - r[0];
    if r.windows(2).all(|w| ((w[1] - w[0]) - d0).abs() <= 1e-9 * d0) {
        return GridKind::Uniform;
    }
    if r[0] > 0.0 {
        let q0 = (r[1] / r[0]).ln();
        if r.windows(2).all(|w| ((w[1] / w[0]).ln() - q0).abs() <= 1e-9 * q0) {
            return GridKind::LogUniform;
        }
    }
    GridKind::Composite
}

/// Density interpolating a sampled profile by a cubic spline.
///
/// Beyond the last sample that is not negligible (1e-15 of the peak) the
/// profile is treated as zero; between the origin and the first radius it is
/// extended by its first value. Panels never straddle a knot.
pub fn profile_density(f: &RadialProfile) -> RadialDensity<'static> {
    let radii = f.radii().to_vec();
    let values = f.values().to_vec();
    let peak = f.max_abs();
    let last = values.iter().rposition(|v| v.norm() > 1e-15 * peak).map(|i| (i + 1).min(radii.len() - 1));
    let n = f.dim();
    let Some(end_idx) = last else {
        // identically zero
        return RadialDensity::new(n, |_| Complex64::new(0.0, 0.0), vec![0.0, 1.0], 1.0, false);
    };
    let end_idx = end_idx.max(1.min(radii.len() - 1));
    let r_end = radii[end_idx].max(radii[0] + f64::EPSILON);
    let first = values[0];
    let r0 = radii[0];
    let spline = if radii.len() >= 2 { Some(ComplexSpline::new(&radii, &values)) } else { None };
    // one panel per spline interval: the integrand is then a cubic times Ω_n on every panel
    let mut breaks = Vec::with_capacity(end_idx + 2);
    if r0 > 0.0 {
        breaks.push(0.0);
    }
    breaks.extend_from_slice(&radii[..=end_idx]);
    if breaks.len() < 2 {
        breaks.push(r_end);
    }
    let h = breaks.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    RadialDensity::new(
        n,
        move |r| {
            if r <= r0 {
                first
            } else {
                spline.as_ref().map(|s| s.eval(r)).unwrap_or(first)
            }
        },
        breaks,
        h,
        false,
    )
}

/// Radial Fourier transform of a sampled profile (symmetric convention).
pub fn radial_fourier(f: &RadialProfile, out_radii: &[f64]) -> Result<RadialProfile> {
    profile_density(f).transform_profile(out_radii, DEFAULT_TOL)
}

/// `P_N f = [ψ_j f̂]^∨` sampled on the radii of `f`.
pub fn band_project(f: &RadialProfile, band: DyadicBand, cutoff: &CutoffProfile) -> Result<RadialProfile> {
    let fwd = profile_density(f);
    let n = f.dim();
    let scale = fwd.mass();
    // |f̂| ≤ scale, so the band piece is at most scale·Ω_n(0)·(2N)^n/n
    let floor = DEFAULT_TOL * scale * omega_at_zero(n) * (2.0 * band.scale()).powi(n as i32) / n as f64;
    let spectrum = band_spectrum(n, band, cutoff, |rho| {
        fwd.hankel(rho, DEFAULT_TOL).map(|v| v.value).unwrap_or(Complex64::new(f64::NAN, 0.0))
    })
    .with_floor(floor);
    if spectrum.mass() <= floor {
        // f̂ is rounding noise on this band
        return RadialProfile::zeros(n, f.radii().to_vec(), f.grid_kind());
    }
    spectrum.transform_profile(f.radii(), DEFAULT_TOL)
}

/// Density `ψ_j(ρ) g(ρ)` on the support of `ψ_j`, broken at `N/2, N, 2N`.
pub fn band_spectrum<'a>(
    n: u32,
    band: DyadicBand,
    cutoff: &CutoffProfile,
    g: impl Fn(f64) -> Complex64 + Send + Sync + 'a,
) -> RadialDensity<'a> {
    let c = *cutoff;
    let j = band.j;
    let nn = band.scale();
    RadialDensity::new(
        n,
        move |rho| {
            let w = c.psi(j, rho);
            if w == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                g(rho) * w
            }
        },
        vec![0.5 * nn, nn, 2.0 * nn],
        nn * c.smooth_scale() * 2.0,
        false,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freq::profile::uniform_grid;

    #[test]
    fn gaussian_is_self_dual() {
        for n in [1u32, 2, 3] {
            let d = RadialDensity::new(n, |r| Complex64::new((-0.5 * r * r).exp(), 0.0), vec![0.0, 12.0], 0.5, false);
            for rho in [0.0, 0.3, 1.0, 2.5, 6.0] {
                let v = d.hankel(rho, 1e-10).unwrap();
                assert!((v.value.re - (-0.5 * rho * rho).exp()).abs() < 1e-12, "n={n} rho={rho} {:?}", v.value);
                assert!(v.value.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_profile_maps_to_zero() {
        let f = RadialProfile::zeros(1, uniform_grid(0.0, 5.0, 20), GridKind::Uniform).unwrap();
        let g = radial_fourier(&f, &[0.0, 1.0, 3.0]).unwrap();
        assert!(g.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn grid_classification() {
        assert_eq!(classify_grid(&uniform_grid(0.0, 1.0, 5)), GridKind::Uniform);
        assert_eq!(classify_grid(&crate::freq::profile::log_grid(1e-2, 1.0, 5)), GridKind::LogUniform);
        assert_eq!(classify_grid(&[0.0, 1.0, 5.0]), GridKind::Composite);
    }
}
