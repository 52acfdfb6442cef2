//! Oscillatory moments `M_n(p, a) = ∫_a^∞ u^p Ω_n(u) du`.
//!
//! Gauss-Legendre panels on `[a, X0]` (dyadic below 1, unit width above),
//! then Hankel's expansion of `Ω_n` integrated term by term:
//!
//! ```text
//! ∫_X^∞ u^q e^{iu} du = i e^{iX} Σ_m i^m q(q−1)…(q−m+1) X^{q−m}.
//! ```
//!
//! When the integral converges only conditionally (`p ≥ (n−1)/2`) the value
//! is its Abel sum, which is what a Fourier transform of the power means.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quad::{gauss_legendre, graded_rule};
use crate::specfun::bessel::{hankel_coefficient, SQRT_2_OVER_PI};
use crate::specfun::{omega_at_zero, omega_n};

/// Start of the asymptotic range.
pub const X0: f64 = 30.0;
const GL_ORDER: usize = 16;

/// `M_n(p, a)` and an absolute error estimate. `a = 0` needs `p > −1`.
pub fn omega_moment(n: u32, p: f64, a: f64) -> Result<(f64, f64)> {
    if !(a >= 0.0) || !a.is_finite() || !p.is_finite() {
        return Err(domain(format!("moment needs finite p and a >= 0, got p = {p}, a = {a}")));
    }
    if a == 0.0 && p <= -1.0 {
        return Err(domain(format!("moment from 0 diverges for p = {p}")));
    }
    let x0 = a.max(X0);
    let mut value = 0.0;
    let mut err = 0.0;
    if a < x0 {
        let (v, e) = near_part(n, p, a, x0);
        value += v;
        err += e;
    }
    let (t, e) = far_part(n, p, x0)?;
    Ok((value + t, err + e))
}

fn near_part(n: u32, p: f64, a: f64, b: f64) -> (f64, f64) {
    let f = |u: f64| u.powf(p) * omega_n(n, u);
    let (xs, ws) = gauss_legendre(GL_ORDER);
    let panel = |lo: f64, hi: f64| {
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        xs.iter().zip(ws).map(|(&x, &w)| w * f(c + r * x)).sum::<f64>() * r
    };
    let mut total = 0.0;
    let mut lo = a;
    if a == 0.0 {
        // graded to a tiny ε, where Ω_n ≈ Ω_n(0) and the rest is exact
        let b0 = b.min(1.0);
        let levels = 60;
        let eps = b0 * 0.15f64.powi(levels);
        total += omega_at_zero(n) * eps.powf(p + 1.0) / (p + 1.0);
        total += graded_rule(b0, 0.15, levels as usize, GL_ORDER).iter().map(|&(u, w)| w * f(u)).sum::<f64>();
        lo = b0;
    }
    while lo < 1.0f64.min(b) {
        let hi = (2.0 * lo).min(1.0).min(b);
        total += panel(lo, hi);
        lo = hi;
    }
    if lo < b {
        let m = (b - lo).ceil() as usize;
        let h = (b - lo) / m as f64;
        for i in 0..m {
            total += panel(lo + i as f64 * h, lo + (i + 1) as f64 * h);
        }
    }
    (total, 64.0 * f64::EPSILON * total.abs().max(omega_at_zero(n) * b.powf(p + 1.0).min(1.0)))
}

/// `∫_X^∞ u^q e^{iu} du` by the integration-by-parts series.
fn fresnel_power(q: f64, x: f64) -> (Complex64, f64) {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut coef: f64 = 1.0; // q(q−1)…(q−m+1) X^{−m}
    let mut im = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for m in 0..200 {
        let mag = coef.abs();
        if mag > prev {
            break;
        }
        sum += im * coef;
        last = mag;
        if mag == 0.0 || mag < 1e-18 * sum.norm() {
            break;
        }
        prev = mag;
        coef *= (q - m as f64) / x;
        im *= Complex64::new(0.0, 1.0);
    }
    let pre = Complex64::new(0.0, 1.0) * Complex64::new(x.cos(), x.sin()) * x.powf(q);
    (pre * sum, last * x.powf(q))
}

fn far_part(n: u32, p: f64, x: f64) -> Result<(f64, f64)> {
    let nu = 0.5 * (n as f64 - 2.0);
    let rot = Complex64::from_polar(1.0, -(nu * FRAC_PI_2 + FRAC_PI_4));
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut prev = f64::INFINITY;
    let mut ik = Complex64::new(1.0, 0.0);
    for k in 0..100 {
        let a = hankel_coefficient(nu, k);
        let size = a.abs() * x.powi(-(k as i32));
        if size > prev {
            err += prev;
            break;
        }
        if a == 0.0 {
            break;
        }
        let (f, e) = fresnel_power(p - nu - 0.5 - k as f64, x);
        sum += ik * a * f;
        err += a.abs() * e;
        prev = size;
        ik *= Complex64::new(0.0, 1.0);
        if size < 1e-18 {
            break;
        }
    }
    let v = SQRT_2_OVER_PI * (rot * sum).re;
    if !v.is_finite() {
        return Err(Error::Quadrature(format!("moment tail not finite for n = {n}, p = {p}")));
    }
    Ok((v, SQRT_2_OVER_PI * err * x.powf(p - nu - 0.5) + 16.0 * f64::EPSILON * v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn classical_improper_integrals() {
        // ∫_0^∞ u^{-1/2} √(2/π) cos u du = 1
        let (v, _) = omega_moment(1, -0.5, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
        // ∫_0^∞ J_0 = 1
        let (v, _) = omega_moment(2, 0.0, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
        // ∫_0^∞ √(2/π) sin u / u du = √(π/2)
        let (v, _) = omega_moment(3, 0.0, 0.0).unwrap();
        assert!((v - (0.5 * PI).sqrt()).abs() < 1e-12, "{v}");
    }

    #[test]
    fn bessel_over_u_near_origin() {
        // ∫_x^∞ J_0(u)/u du = −γ − ln(x/2) + x²/8 − …
        let x = 1e-4;
        let (v, _) = omega_moment(2, -1.0, x).unwrap();
        let want = -0.577_215_664_901_532_9 - (0.5 * x).ln() + x * x / 8.0;
        assert!((v - want).abs() < 1e-11, "{v} vs {want}");
    }

    #[test]
    fn far_start_uses_expansion_only() {
        // ∫_a^∞ √(2/π) cos u u^{-2} du against a fine panel sum to 4000 plus the expansion from there
        let a = 45.0;
        let (v, _) = omega_moment(1, -2.0, a).unwrap();
        let (mid, _) = near_part(1, -2.0, a, 4000.0);
        let (tail, _) = far_part(1, -2.0, 4000.0).unwrap();
        assert!((v - mid - tail).abs() < 1e-13, "{v} vs {}", mid + tail);
    }
}
