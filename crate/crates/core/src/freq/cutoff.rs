//! Smooth dyadic cutoffs.
//!
//! `φ(r) = 1` for `r ≤ 1`, `0` for `r ≥ 2`, and on `(1, 2)`
//! `φ(r) = q(2 − r) / (q(2 − r) + q(r − 1))` with `q(s) = exp(−σ/s)`.
//! The construction is symmetric: `φ(r) + φ(3 − r) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    sharpness: f64,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        CutoffProfile { sharpness: 1.0 }
    }
}

/// Dyadic frequency band `N = 2^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicBand {
    pub j: i32,
}

impl DyadicBand {
    pub fn new(j: i32) -> Self {
        DyadicBand { j }
    }

    /// `N = 2^j`.
    pub fn scale(self) -> f64 {
        2f64.powi(self.j)
    }

    /// Closed support `[2^{j−1}, 2^{j+1}]` of `ψ_j`.
    pub fn support(self) -> (f64, f64) {
        let n = self.scale();
        (0.5 * n, 2.0 * n)
    }
}

/// Builds the cutoff; `sharpness` is the `σ` in `q(s) = exp(−σ/s)`.
pub fn build_cutoff(sharpness: f64) -> Result<CutoffProfile> {
    if !(sharpness > 0.0) || !sharpness.is_finite() {
        return Err(domain(format!("cutoff sharpness must be positive, got {sharpness}")));
    }
    Ok(CutoffProfile { sharpness })
}

impl CutoffProfile {
    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    #[inline]
    fn q(&self, s: f64) -> f64 {
        if s > 0.0 {
            (-self.sharpness / s).exp()
        } else {
            0.0
        }
    }

    /// `φ(r)`; radial, so `φ(−r) = φ(r)`.
    #[inline]
    pub fn phi(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= 1.0 {
            1.0
        } else if r >= 2.0 {
            0.0
        } else {
            let a = self.q(2.0 - r);
            let b = self.q(r - 1.0);
            a / (a + b)
        }
    }

    /// Exterior split `Φ = 1 − φ`: zero on `|r| ≤ 1`, one on `|r| ≥ 2`.
    #[inline]
    pub fn exterior(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= 1.0 {
            0.0
        } else if r >= 2.0 {
            1.0
        } else {
            let a = self.q(2.0 - r);
            let b = self.q(r - 1.0);
            b / (a + b)
        }
    }

    /// `ψ_j(r) = φ(r / 2^j) − φ(r / 2^{j−1})`.
    #[inline]
    pub fn psi(&self, j: i32, r: f64) -> f64 {
        let s = r.abs() * 2f64.powi(-j);
        self.phi(s) - self.phi(2.0 * s)
    }

    /// `ψ(r) = ψ_0(r)`.
    #[inline]
    pub fn psi0(&self, r: f64) -> f64 {
        self.psi(0, r)
    }

    /// Length scale on which `φ` varies; panel widths stay below this.
    pub fn smooth_scale(&self) -> f64 {
        // the transition layer near each edge has width ~ σ / ln(1/ε)
        (0.05 * self.sharpness).clamp(1e-3, 0.125)
    }
}

/// `ψ_j(r)` with the default cutoff.
pub fn psi(cutoff: &CutoffProfile, j: i32, r: f64) -> f64 {
    cutoff.psi(j, r)
}
