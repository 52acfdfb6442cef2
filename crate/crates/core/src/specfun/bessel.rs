//! Bessel functions of the first kind and the radial Fourier kernel `Ω_n`.
//!
//! `J_ν(x)` for `ν ≥ -1/2`, `x ≥ 0`:
//! * closed forms at `ν = ±1/2`;
//! * power series for `x ≤ 12`;
//! * Hankel's expansion wherever its smallest term is below ~1e-15;
//! * otherwise, for integer order, Bessel's integral by the trapezoid rule
//!   (the integrand is periodic, so it converges geometrically), and the
//!   Poisson integral on Gauss-Legendre panels for the rest.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use super::gamma::{gamma_real, recip_gamma};
use super::{EvalDiagnostics, EvalMethod};
use crate::error::{domain, Result};
use crate::quad::gauss_legendre;

const SERIES_X_MAX: f64 = 12.0;
/// `√(2/π)`.
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// `a_k(ν) = Π_{m=1..k} (4ν² − (2m−1)²) / (k! 8^k)`.
pub fn hankel_coefficient(nu: f64, k: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut a = 1.0;
    for m in 1..=k {
        let odd = (2 * m - 1) as f64;
        a *= (mu - odd * odd) / (8.0 * m as f64);
    }
    a
}

/// Optimally truncated `Σ_k i^k a_k(ν) x^{-k}`; returns the sum and the
/// magnitude of the first omitted term (zero if the series terminated).
pub(crate) fn hankel_sum(nu: f64, x: f64) -> (Complex64, f64) {
    let mu = 4.0 * nu * nu;
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    for m in 1..200 {
        let odd = (2 * m - 1) as f64;
        let f = (mu - odd * odd) / (8.0 * m as f64 * x);
        if f == 0.0 {
            return (sum, 0.0);
        }
        let next = term * Complex64::new(0.0, f);
        let mag = next.norm();
        if mag >= prev || mag < 1e-18 {
            return (sum, mag.min(prev));
        }
        sum += next;
        term = next;
        prev = mag;
    }
    (sum, prev)
}

fn series(nu: f64, x: f64) -> (f64, usize) {
    let h = 0.5 * x;
    let mut term = h.powf(nu) * recip_gamma(nu + 1.0);
    let mut sum = term;
    let q = h * h;
    let mut k = 1usize;
    loop {
        term *= -q / (k as f64 * (k as f64 + nu));
        sum += term;
        if k as f64 > h && term.abs() <= 1e-17 * sum.abs() {
            return (sum, k + 1);
        }
        if k > 400 {
            return (sum, k + 1);
        }
        k += 1;
    }
}

/// `2 ∫_0^{π/2} cos(x cos θ) sin^{2ν} θ dθ` on `m` panels.
fn poisson_integral(nu: f64, x: f64, m: usize) -> (f64, usize) {
    let (nodes, weights) = gauss_legendre(16);
    let two_nu = 2.0 * nu;
    let graded = (two_nu - two_nu.round()).abs() > 1e-14;
    let h = FRAC_PI_2 / m as f64;
    let f = |t: f64| (x * t.cos()).cos() * t.sin().powf(two_nu);
    let panel = |a: f64, b: f64| {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        nodes.iter().zip(weights.iter()).map(|(&u, &w)| w * f(c + r * u)).sum::<f64>() * r
    };
    let mut total = 0.0;
    let mut count = 0;
    for i in 0..m {
        let a = i as f64 * h;
        let b = a + h;
        if i == 0 && graded {
            // geometric grading towards the θ^{2ν} endpoint
            let q: f64 = 0.15;
            let levels = 18;
            let mut hi = b;
            for _ in 0..levels {
                let lo = hi * q;
                total += panel(lo, hi);
                count += 16;
                hi = lo;
            }
        } else {
            total += panel(a, b);
            count += 16;
        }
    }
    (2.0 * total, count)
}

/// `(1/π) ∫_0^π cos(mθ − x sin θ) dθ`; the aliasing error is of order
/// `J_{2M−m}(x)`, far below rounding for `M ≥ x/2 + 24`.
fn bessel_integral(m: f64, x: f64) -> (f64, EvalDiagnostics) {
    let panels = (0.5 * x).ceil() as usize + 24 + m as usize;
    let h = PI / panels as f64;
    let f = |t: f64| (m * t - x * t.sin()).cos();
    let mut sum = 0.5 * (f(0.0) + f(PI));
    for i in 1..panels {
        sum += f(i as f64 * h);
    }
    (sum / panels as f64, EvalDiagnostics::new(EvalMethod::PoissonQuadrature, panels + 1, 16.0 * f64::EPSILON))
}

fn poisson(nu: f64, x: f64) -> Result<(f64, EvalDiagnostics)> {
    let pref = (0.5 * x).powf(nu) / (PI.sqrt() * gamma_real(nu + 0.5)?);
    let m = (x / 2.0).ceil() as usize + 4;
    let (i1, n1) = poisson_integral(nu, x, m);
    let (i2, n2) = poisson_integral(nu, x, 2 * m);
    let est = pref * (i2 - i1).abs() + 8.0 * f64::EPSILON * pref * FRAC_PI_2;
    Ok((pref * i2, EvalDiagnostics::new(EvalMethod::PoissonQuadrature, n1 + n2, est)))
}

/// `J_ν(x)` for `ν ≥ -1/2`, `x ≥ 0`.
pub fn bessel_j(nu: f64, x: f64) -> Result<(f64, EvalDiagnostics)> {
    if !(nu >= -0.5) || !nu.is_finite() {
        return Err(domain(format!("Bessel order must be >= -1/2, got {nu}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("Bessel argument must be finite and >= 0, got {x}")));
    }
    if x == 0.0 {
        let v = if nu == 0.0 {
            1.0
        } else if nu == -0.5 {
            f64::INFINITY
        } else {
            0.0
        };
        return Ok((v, EvalDiagnostics::new(EvalMethod::ClosedForm, 0, 0.0)));
    }
    if nu == 0.5 || nu == -0.5 {
        let amp = SQRT_2_OVER_PI / x.sqrt();
        let v = if nu > 0.0 { amp * x.sin() } else { amp * x.cos() };
        return Ok((v, EvalDiagnostics::new(EvalMethod::ClosedForm, 0, 4.0 * f64::EPSILON * amp)));
    }
    if x <= SERIES_X_MAX {
        let (v, k) = series(nu, x);
        let est = 4.0 * f64::EPSILON * (0.5 * x).powf(nu).max(1.0) * (0.5 * x).exp().max(1.0) * recip_gamma(nu + 1.0);
        return Ok((v, EvalDiagnostics::new(EvalMethod::Series, k, est)));
    }
    let (s, tail) = hankel_sum(nu, x);
    let amp = SQRT_2_OVER_PI / x.sqrt();
    if tail <= 1e-15 {
        // e^{iχ} = e^{ix} e^{-i(νπ/2 + π/4)}, keeping x unrounded in the phase
        let phase = Complex64::new(x.cos(), x.sin()) * Complex64::from_polar(1.0, -(nu * FRAC_PI_2 + FRAC_PI_4));
        let v = amp * (phase * s).re;
        let est = amp * (tail + 8.0 * f64::EPSILON);
        return Ok((v, EvalDiagnostics::new(EvalMethod::Asymptotic, 0, est)));
    }
    if nu.fract() == 0.0 {
        return Ok(bessel_integral(nu, x));
    }
    poisson(nu, x)
}

/// `Ω_n(s) = s^{-(n-2)/2} J_{(n-2)/2}(s)`, the radial kernel of the
/// `n`-dimensional Fourier transform (`Ω_1 = √(2/π) cos`).
pub fn omega_n(n: u32, s: f64) -> f64 {
    let s = s.abs();
    match n {
        1 => SQRT_2_OVER_PI * s.cos(),
        3 => {
            if s < 1e-3 {
                let s2 = s * s;
                SQRT_2_OVER_PI * (1.0 - s2 / 6.0 * (1.0 - s2 / 20.0))
            } else {
                SQRT_2_OVER_PI * s.sin() / s
            }
        }
        _ => {
            let nu = 0.5 * (n as f64 - 2.0);
            if s <= SERIES_X_MAX {
                omega_series(nu, s)
            } else {
                bessel_j(nu, s).map(|(v, _)| v * s.powf(-nu)).unwrap_or(f64::NAN)
            }
        }
    }
}

/// `Ω_n(0) = 2^{-(n-2)/2} / Γ(n/2) = max |Ω_n|`.
pub fn omega_at_zero(n: u32) -> f64 {
    let nu = 0.5 * (n as f64 - 2.0);
    2f64.powf(-nu) * recip_gamma(nu + 1.0)
}

fn omega_series(nu: f64, s: f64) -> f64 {
    let h = 0.5 * s;
    let q = h * h;
    let mut term = 2f64.powf(-nu) * recip_gamma(nu + 1.0);
    let mut sum = term;
    let mut k = 1usize;
    loop {
        term *= -q / (k as f64 * (k as f64 + nu));
        sum += term;
        if (k as f64 > h && term.abs() <= 1e-17 * sum.abs()) || k > 400 || term == 0.0 {
            return sum;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn j0_and_j1_reference() {
        assert_relative_eq!(bessel_j(0.0, 1.0).unwrap().0, 0.765_197_686_557_966_6, max_relative = 1e-14);
        assert_relative_eq!(bessel_j(1.0, 2.0).unwrap().0, 0.576_724_807_756_873_4, max_relative = 1e-14);
    }

    #[test]
    fn half_order_closed_forms() {
        let x = 3.7;
        assert_relative_eq!(bessel_j(0.5, x).unwrap().0, SQRT_2_OVER_PI * x.sin() / x.sqrt(), max_relative = 1e-15);
        assert_eq!(bessel_j(0.5, x).unwrap().1.method, EvalMethod::ClosedForm);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j(-1.0, 1.0).is_err());
        assert!(bessel_j(0.0, -1.0).is_err());
    }

    #[test]
    fn omega_special_cases() {
        assert_relative_eq!(omega_n(3, 0.0), SQRT_2_OVER_PI);
        assert_relative_eq!(omega_n(3, 0.0), omega_at_zero(3), max_relative = 1e-15);
        assert_relative_eq!(omega_n(1, 0.0), omega_at_zero(1), max_relative = 1e-15);
        assert_relative_eq!(omega_n(2, 0.0), 1.0);
        assert_relative_eq!(omega_n(2, 1.0), 0.765_197_686_557_966_6, max_relative = 1e-14);
        assert_relative_eq!(omega_n(3, 2.0), SQRT_2_OVER_PI * 2f64.sin() / 2.0, max_relative = 1e-15);
        // n = 4: J_1(s)/s
        assert_relative_eq!(omega_n(4, 2.0), 0.576_724_807_756_873_4 / 2.0, max_relative = 1e-14);
        assert_relative_eq!(omega_n(4, 0.0), 0.5);
    }

    #[test]
    fn hankel_terminates_for_half_integers() {
        let (s, tail) = hankel_sum(1.5, 20.0);
        assert_eq!(tail, 0.0);
        // J_{3/2} = √(2/(πx)) (sin x / x − cos x)
        let x: f64 = 20.0;
        let chi = x - 1.5 * FRAC_PI_2 - FRAC_PI_4;
        let v = SQRT_2_OVER_PI / x.sqrt() * (Complex64::from_polar(1.0, chi) * s).re;
        assert_relative_eq!(v, SQRT_2_OVER_PI / x.sqrt() * (x.sin() / x - x.cos()), max_relative = 1e-14);
    }
}
