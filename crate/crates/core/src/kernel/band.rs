//! `K_t^N(x) = ∫ E_α(−it^α|ξ|^β) ψ(|ξ|/N) e^{ix·ξ} dξ`.
//!
//! After `ξ = Nη` this is `N^n c_n I(s, N|x|)` with `s = t^α N^β` and
//! `I(s, y) = ∫_{1/2}^2 E_α(−isr^β) ψ(r) r^{n−1} Ω_n(ry) dr`.

use num_complex::Complex64;

use super::{exp_phase_rate, KernelSample, KernelSpec};
use crate::error::{domain, Result};
use crate::freq::{log_grid, CutoffProfile, DyadicBand, RadialDensity};
use crate::quad::panel_rule;
use crate::specfun::{ml_eval, omega_at_zero, omega_n, recip_gamma, EvalDiagnostics, EvalMethod};

/// Agreement between panel doublings, relative to the integrand's `L¹` mass.
pub const BAND_TOL: f64 = 1e-10;

/// The band kernel at fixed `(t, N)`; samples in `x` share one cached set of
/// `E_α` evaluations.
pub struct BandKernel {
    spec: KernelSpec,
    t: f64,
    band: DyadicBand,
    s: f64,
    prefactor: f64,
    cutoff: CutoffProfile,
    density: RadialDensity<'static>,
}

impl BandKernel {
    pub fn new(spec: KernelSpec, t: f64, band: DyadicBand) -> Result<Self> {
        Self::with_cutoff(spec, t, band, CutoffProfile::default())
    }

    pub fn with_cutoff(spec: KernelSpec, t: f64, band: DyadicBand, cutoff: CutoffProfile) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(domain(format!("time must be finite and >= 0, got {t}")));
        }
        let nn = band.scale();
        let (alpha, beta) = (spec.alpha.get(), spec.beta);
        let s = t.powf(alpha) * nn.powf(beta);
        let rate = (0..=64).map(|i| exp_phase_rate(alpha, beta, s, 0.5 + 1.5 * i as f64 / 64.0)).fold(0.0, f64::max);
        let mut h = 2.0 * cutoff.smooth_scale();
        if rate > 0.0 {
            h = h.min(std::f64::consts::PI / rate);
        }
        let order = spec.alpha;
        let c = cutoff;
        let density = RadialDensity::new(
            spec.n,
            move |r| {
                let w = c.psi0(r);
                if w == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let z = Complex64::new(0.0, -s * r.powf(beta));
                ml_eval(order, z).map(|(e, _)| e * w).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            },
            vec![0.5, 1.0, 2.0],
            h,
            false,
        );
        let prefactor = nn.powi(spec.n as i32) * spec.radial_factor();
        Ok(BandKernel { spec, t, band, s, prefactor, cutoff, density })
    }

    /// `t^α N^β`.
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn band(&self) -> DyadicBand {
        self.band
    }

    /// The dimensionless integral `I(s, N|x|)`.
    pub fn core(&self, x_radius: f64) -> Result<(Complex64, usize, f64)> {
        let y = self.band.scale() * x_radius.abs();
        let v = self.density.hankel(y, BAND_TOL)?;
        Ok((v.value, v.nodes, v.est_error))
    }

    pub fn at(&self, x_radius: f64) -> Result<KernelSample> {
        let (v, nodes, err) = self.core(x_radius)?;
        Ok(KernelSample {
            t: self.t,
            band_scale: Some(self.band.scale()),
            x_radius,
            value: v * self.prefactor,
            diagnostics: EvalDiagnostics::new(EvalMethod::Quadrature, nodes, err * self.prefactor),
            panels: nodes / 16,
            tail_bound: 0.0,
        })
    }

    /// `N^n c_n Ω_n(0) ∫ |E_α(−isr^β)| ψ(r) r^{n−1} dr`, which bounds `|K_t^N|`.
    pub fn triangle_bound(&self) -> Result<f64> {
        let order = self.spec.alpha;
        let nm1 = self.spec.n as i32 - 1;
        let mut total = 0.0;
        for (r, w) in panel_rule(0.5, 2.0, 1.5 / 256.0, 16) {
            let z = Complex64::new(0.0, -self.s * r.powf(self.spec.beta));
            total += w * ml_eval(order, z)?.0.norm() * self.cutoff.psi0(r) * r.powi(nm1);
        }
        Ok(self.prefactor * omega_at_zero(self.spec.n) * total)
    }

    /// `(x*, max |K_t^N|)` over `x_grid`.
    pub fn sup(&self, x_grid: &[f64]) -> Result<(f64, f64)> {
        let vals = crate::par_map(x_grid, |&x| self.at(x).map(|k| k.value.norm()));
        let mut best = (f64::NAN, -1.0);
        for (&x, v) in x_grid.iter().zip(vals) {
            let v = v?;
            if v > best.1 {
                best = (x, v);
            }
        }
        if best.1 < 0.0 {
            return Err(domain("empty x grid"));
        }
        Ok(best)
    }
}

/// `K_t^N(x)`; see [`BandKernel`] for repeated evaluation.
pub fn kernel_band(spec: KernelSpec, t: f64, band: DyadicBand, x_radius: f64) -> Result<KernelSample> {
    BandKernel::new(spec, t, band)?.at(x_radius)
}

/// Split `I = I₁ + I₂` of the lower-bound argument: `I₂` integrates the
/// first asymptotic term `−i/(Γ(1−α) s r^β)` of `E_α(−isr^β)`, `I₁` the rest.
pub fn band_split(spec: KernelSpec, t: f64, band: DyadicBand, x_radius: f64) -> Result<(Complex64, Complex64)> {
    let k = BandKernel::new(spec, t, band)?;
    let (total, _, _) = k.core(x_radius)?;
    let s = k.s;
    if s == 0.0 {
        return Err(domain("the split needs t > 0"));
    }
    let c1 = Complex64::new(0.0, -recip_gamma(1.0 - spec.alpha.get()));
    let y = band.scale() * x_radius.abs();
    let cut = k.cutoff;
    let n = spec.n;
    let mut i2 = 0.0;
    let width = (0.02f64).min(std::f64::consts::PI / (4.0 * y.max(1e-300)));
    for (r, w) in panel_rule(0.5, 2.0, width, 16) {
        i2 += w * cut.psi0(r) * r.powf(n as f64 - 1.0 - spec.beta) * omega_n(n, r * y);
    }
    let i2 = c1 * (i2 / s);
    Ok((total - i2, i2))
}

/// `{0} ∪` log-uniform `N|x| ∈ [1e-3, 1e2]` with `points` entries.
pub fn default_x_grid(band: DyadicBand, points: usize) -> Vec<f64> {
    let nn = band.scale();
    let mut g = vec![0.0];
    g.extend(log_grid(1e-3, 1e2, points).into_iter().map(|y| y / nn));
    g
}

/// `(x*, max_x |K_t^N(x)|)` over `x_grid`.
pub fn sup_search(spec: KernelSpec, t: f64, band: DyadicBand, x_grid: &[f64]) -> Result<(f64, f64)> {
    BandKernel::new(spec, t, band)?.sup(x_grid)
}
