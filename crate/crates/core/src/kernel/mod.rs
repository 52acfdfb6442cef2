//! Fundamental solutions `K_t`, band-limited kernels `K_t^N` and the
//! auxiliary pieces of their small-`x` expansion.
//!
//! Everything is radial: `∫ m(|ξ|) e^{ix·ξ} dξ = c_n ∫_0^∞ m(r) r^{n−1} Ω_n(r|x|) dr`
//! with `c_n = (2π)^{n/2}` for the un-normalised integral (the default) and
//! `c_n = 1` for the symmetric convention used by `freq`.

mod band;
mod full;
mod moment;

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::freq::fmt17;
use crate::specfun::{EvalDiagnostics, MLOrder};

pub use band::{band_split, default_x_grid, kernel_band, sup_search, BandKernel};
pub use full::{
    expansion_coefficient, expansion_residual, expansion_sum, kernel_full, riesz_constant, tail_radius, w1_eval,
    FullKernel,
};
pub use moment::omega_moment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `∫ E_α(−it^α|ξ|^β) e^{ix·ξ} dξ`.
    #[default]
    PaperUnnormalized,
    /// `(2π)^{−n/2} ∫ E_α(−it^α|ξ|^β) e^{ix·ξ} dξ`.
    Symmetric,
}

impl Normalization {
    /// `c_n` with `∫ m(|ξ|) e^{ix·ξ} dξ = c_n ∫ m(r) r^{n−1} Ω_n(r|x|) dr` (times the convention's prefactor).
    pub fn radial_factor(self, n: u32) -> f64 {
        match self {
            Normalization::PaperUnnormalized => (2.0 * PI).powf(0.5 * n as f64),
            Normalization::Symmetric => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `β > n`: `K_t` is bounded.
    Subcritical,
    /// `0 < β ≤ n`, `n/β` not an integer.
    CriticalOrSuper,
    /// `β = n/m`: the `m`-th expansion term is logarithmic.
    Resonant { m: u32 },
}

/// `(n, α, β)` plus the Fourier convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct KernelSpec {
    pub n: u32,
    pub alpha: MLOrder,
    pub beta: f64,
    #[serde(default)]
    pub normalization: Normalization,
}

#[derive(Deserialize)]
struct RawSpec {
    n: u32,
    alpha: f64,
    beta: f64,
    #[serde(default)]
    normalization: Normalization,
}

impl TryFrom<RawSpec> for KernelSpec {
    type Error = crate::Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        KernelSpec::new(r.n, r.alpha, r.beta).map(|s| s.with_normalization(r.normalization))
    }
}

impl KernelSpec {
    pub fn new(n: u32, alpha: f64, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(domain("dimension must be at least 1"));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(domain(format!("beta must be positive, got {beta}")));
        }
        Ok(KernelSpec { n, alpha: MLOrder::new(alpha)?, beta, normalization: Normalization::default() })
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn regime(&self) -> Regime {
        let m = self.n as f64 / self.beta;
        let mr = m.round();
        if mr >= 1.0 && (m - mr).abs() <= 1e-12 * m {
            Regime::Resonant { m: mr as u32 }
        } else if self.beta > self.n as f64 {
            Regime::Subcritical
        } else {
            Regime::CriticalOrSuper
        }
    }

    /// Power `nα/β` in `K_t(x) = t^{−nα/β} K_1(x t^{−α/β})`.
    pub fn decay_power(&self) -> f64 {
        self.n as f64 * self.alpha.get() / self.beta
    }

    pub(crate) fn radial_factor(&self) -> f64 {
        self.normalization.radial_factor(self.n)
    }
}

/// One kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub t: f64,
    /// Band scale `N`, or `None` for the full kernel.
    pub band_scale: Option<f64>,
    pub x_radius: f64,
    pub value: Complex64,
    pub diagnostics: EvalDiagnostics,
    pub panels: usize,
    /// Bound on the analytically handled tail (zero for band kernels).
    pub tail_bound: f64,
}

pub const KERNEL_CSV_HEADER: &str = "t,N,x,re,im,abs,panels,tail_bound";

impl KernelSample {
    pub fn csv_row(&self) -> String {
        let nn = self.band_scale.map(fmt17).unwrap_or_else(|| "inf".to_string());
        format!(
            "{},{},{},{},{},{},{},{}",
            fmt17(self.t),
            nn,
            fmt17(self.x_radius),
            fmt17(self.value.re),
            fmt17(self.value.im),
            fmt17(self.value.norm()),
            self.panels,
            fmt17(self.tail_bound)
        )
    }
}

pub fn write_kernel_csv<W: Write>(mut w: W, samples: &[KernelSample]) -> std::io::Result<()> {
    writeln!(w, "{KERNEL_CSV_HEADER}")?;
    for s in samples {
        writeln!(w, "{}", s.csv_row())?;
    }
    Ok(())
}

/// `|E_α(−isr^β)|` oscillates only through `α^{-1} exp(z^{1/α})`; the rate of its
/// phase in `r`, or 0 once that term is below 1e-17.
pub(crate) fn exp_phase_rate(alpha: f64, beta: f64, s: f64, r: f64) -> f64 {
    if alpha < 0.5 || r <= 0.0 {
        return 0.0;
    }
    let (sn, cs) = (0.5 * PI / alpha).sin_cos();
    let w = (s * r.powf(beta)).powf(1.0 / alpha);
    if alpha < 1.0 && w * cs.abs() > 40.0 {
        return 0.0;
    }
    beta / alpha * w * sn.abs() / r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert_eq!(KernelSpec::new(1, 0.5, 2.0).unwrap().regime(), Regime::Subcritical);
        assert_eq!(KernelSpec::new(1, 0.5, 0.5).unwrap().regime(), Regime::Resonant { m: 2 });
        assert_eq!(KernelSpec::new(2, 0.5, 2.0).unwrap().regime(), Regime::Resonant { m: 1 });
        assert_eq!(KernelSpec::new(3, 0.5, 0.7).unwrap().regime(), Regime::CriticalOrSuper);
        assert!(KernelSpec::new(1, 1.5, 1.0).is_err());
        assert!(KernelSpec::new(1, 0.5, -1.0).is_err());
    }

    #[test]
    fn spec_serde_validates() {
        let s: KernelSpec = serde_json::from_str(r#"{"n":1,"alpha":0.5,"beta":2.0}"#).unwrap();
        assert_eq!(s.normalization, Normalization::PaperUnnormalized);
        assert!(serde_json::from_str::<KernelSpec>(r#"{"n":1,"alpha":0.0,"beta":2.0}"#).is_err());
    }

    #[test]
    fn paper_factor_times_omega_zero_is_sphere_area() {
        for n in 1..=4 {
            let lhs = Normalization::PaperUnnormalized.radial_factor(n) * crate::specfun::omega_at_zero(n);
            assert!((lhs - crate::freq::sphere_area(n)).abs() < 1e-13 * lhs);
        }
    }
}
