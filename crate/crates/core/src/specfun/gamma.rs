//! Real Gamma function, its reciprocal and logarithm.

use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument for which `Γ(x)` is finite in f64.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

/// `sin(πx)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    if x == x.trunc() {
        return 0.0;
    }
    // reduce to [-1, 1]
    let mut r = x % 2.0;
    if r > 1.0 {
        r -= 2.0;
    } else if r < -1.0 {
        r += 2.0;
    }
    // sin(π r) on [-1, 1] via the nearest of sin/cos on a quarter period
    let sign = if r < 0.0 { -1.0 } else { 1.0 };
    let a = r.abs();
    let v = if a <= 0.25 {
        (PI * a).sin()
    } else if a <= 0.75 {
        (PI * (0.5 - a)).cos()
    } else {
        (PI * (1.0 - a)).sin()
    };
    sign * v
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.trunc()
}

/// Lanczos sum for `x ≥ 0.5`; returns `(A_g(x), t)` with `t = x + g - 0.5`
/// where `Γ(x) = √(2π) t^{x-0.5} e^{-t} A_g(x)`.
fn lanczos(x: f64) -> (f64, f64) {
    let xm1 = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (xm1 + i as f64);
    }
    (a, xm1 + LANCZOS_G + 0.5)
}

fn gamma_pos(x: f64) -> f64 {
    // exact factorials for small integers
    if x == x.trunc() && x <= 23.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    let (a, t) = lanczos(x);
    let half = t.powf(0.5 * (x - 0.5));
    (2.0 * PI).sqrt() * a * half * (half * (-t).exp())
}

/// `Γ(x)` for real `x`.
///
/// Fails at the poles `x ∈ {0, -1, -2, …}` and for `x > 171.62` where the
/// result overflows.
pub fn gamma_real(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("gamma of NaN".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::GammaOverflow(x));
    }
    if x >= 0.5 {
        Ok(gamma_pos(x))
    } else {
        // Γ(x) Γ(1-x) = π / sin(πx)
        let g = gamma_pos(1.0 - x);
        Ok(PI / (sin_pi(x) * g))
    }
}

/// `1/Γ(x)`, exactly zero at the poles of `Γ`.
pub fn recip_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x >= 0.5 {
        if x > GAMMA_MAX_ARG {
            return (-ln_gamma(x)).exp();
        }
        1.0 / gamma_pos(x)
    } else {
        let y = 1.0 - x;
        let s = sin_pi(x) / PI;
        if y > GAMMA_MAX_ARG {
            return s * ln_gamma(y).exp();
        }
        s * gamma_pos(y)
    }
}

/// `ln |Γ(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x >= 0.5 {
        if x < 20.0 {
            return gamma_pos(x).ln();
        }
        let (a, t) = lanczos(x);
        0.5 * (2.0 * PI).ln() + (x - 0.5) * t.ln() - t + a.ln()
    } else {
        (PI / sin_pi(x).abs()).ln() - ln_gamma(1.0 - x)
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_trivial_values() {
        assert_eq!(gamma_real(1.0).unwrap(), 1.0);
        assert_eq!(gamma_real(5.0).unwrap(), 24.0);
        assert_relative_eq!(gamma_real(0.5).unwrap(), 1.772_453_850_905_516, max_relative = 1e-14);
    }

    #[test]
    fn gamma_reference_values() {
        // mpmath, 17 digits
        let cases = [
            (0.1, 9.513_507_698_668_731_8),
            (1.5, 0.886_226_925_452_758_01),
            (2.5, 1.329_340_388_179_137),
            (-0.5, -3.544_907_701_811_032),
            (-1.5, 2.363_271_801_207_354_7),
            (-2.3, -1.447_107_394_255_918_1),
            (7.3, 1_271.423_633_663_908_8),
            (33.7, 3.032_162_654_739_871_8e36),
            (100.5, 9.320_963_104_082_716_6e156),
            (170.2, 1.191_841_116_636_669_6e305),
            (0.75, 1.225_416_702_465_177_6),
            (0.25, 3.625_609_908_221_908),
        ];
        for (x, g) in cases {
            // conditioning of t^{x-1/2} grows like x ln x · ε
            let tol = if x > 100.0 { 1e-12 } else { 1e-13 };
            assert_relative_eq!(gamma_real(x).unwrap(), g, max_relative = tol);
        }
    }

    #[test]
    fn gamma_errors() {
        assert_eq!(gamma_real(0.0), Err(Error::GammaPole(0.0)));
        assert_eq!(gamma_real(-3.0), Err(Error::GammaPole(-3.0)));
        assert!(matches!(gamma_real(172.0), Err(Error::GammaOverflow(_))));
    }

    #[test]
    fn reciprocal_gamma_poles() {
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-1.0), 0.0);
        assert_eq!(recip_gamma(-40.0), 0.0);
        assert_eq!(recip_gamma(1.0), 1.0);
        assert_relative_eq!(recip_gamma(-0.5), -0.282_094_791_773_878_14, max_relative = 1e-14);
        assert_relative_eq!(recip_gamma(0.3), 1.0 / 2.991_568_987_687_591, max_relative = 1e-13);
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.3, 1.7, 12.0, 25.5, 60.25, 150.0] {
            assert_relative_eq!(ln_gamma(x), gamma_real(x).unwrap().ln(), max_relative = 1e-13);
        }
        assert_relative_eq!(ln_gamma(1000.0), 5_905.220_423_209_181, max_relative = 1e-14);
    }

    #[test]
    fn sin_pi_exact_zeros() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(sin_pi(-7.0), 0.0);
        assert_relative_eq!(sin_pi(0.5), 1.0);
        assert_relative_eq!(sin_pi(-2.5), -1.0);
        assert_relative_eq!(sin_pi(1.25), -(0.25 * PI).sin(), max_relative = 1e-15);
    }
}
