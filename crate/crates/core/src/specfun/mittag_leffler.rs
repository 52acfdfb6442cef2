//! The one-parameter Mittag-Leffler function `E_α(z) = Σ z^k / Γ(αk + 1)`.
//!
//! Two evaluation routes are provided and cross-checked on a shared annulus:
//!
//! * the power series, summed in f64 when `w = |z|^{1/α} ≤ 4` and in
//!   double-double arithmetic up to `w = 40` (the largest series term is
//!   about `e^w`, so cancellation eats `w / ln 10` digits);
//! * the algebraic asymptotic expansion
//!   `E_α(z) ≈ [α⁻¹ exp(z^{1/α})] − Σ_{j=1}^{k} z^{-j} / Γ(1 − αj)`,
//!   where the bracketed term is kept only inside the sector `|arg z| ≤ θ`.
//!
//! `ml_eval` dispatches on `w`; the two routes overlap for `26 ≤ w ≤ 40`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dd::{ln_gamma_dd, CDd, Dd};
use super::gamma::{ln_gamma, recip_gamma};
use super::{EvalDiagnostics, EvalMethod};
use crate::error::{domain, Error, Result};

/// Largest `w = |z|^{1/α}` accepted by the series route.
pub const SERIES_W_MAX: f64 = 40.0;
/// Smallest `w = |z|^{1/α}` accepted by the asymptotic route.
pub const ASYMPTOTIC_W_MIN: f64 = 26.0;
/// `ml_eval` uses the series for `w ≤ SWITCH_W`.
pub const SWITCH_W: f64 = 33.0;
const F64_SERIES_W_MAX: f64 = 4.0;
const SERIES_TERM_CAP: usize = 20_000;
const ASYMPTOTIC_TERM_CAP: usize = 600;

/// Order `α` of the Mittag-Leffler function, `0 < α ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MLOrder(f64);

impl MLOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(MLOrder(alpha))
        } else {
            Err(domain(format!("Mittag-Leffler order must lie in (0, 1], got {alpha}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `|z|` above which the series is no longer used.
    pub fn series_radius(self) -> f64 {
        SERIES_W_MAX.powf(self.0)
    }

    /// `|z|` below which the asymptotic expansion is refused.
    pub fn asymptotic_radius(self) -> f64 {
        ASYMPTOTIC_W_MIN.powf(self.0)
    }

    /// Sector half-angle `θ`: midpoint of `(πα/2, min(π, απ))`.
    pub fn sector_angle(self) -> f64 {
        let a = self.0;
        0.5 * (0.5 * PI * a + (PI * a).min(PI))
    }
}

impl TryFrom<f64> for MLOrder {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        MLOrder::new(v)
    }
}

impl From<MLOrder> for f64 {
    fn from(o: MLOrder) -> f64 {
        o.0
    }
}

fn scaled_modulus(order: MLOrder, z: Complex64) -> f64 {
    z.norm().powf(1.0 / order.get())
}

/// Power series of `E_α(z)`, truncated once the terms have passed their
/// peak and dropped below `tol · |partial sum|`.
pub fn ml_series(order: MLOrder, z: Complex64, tol: f64) -> Result<(Complex64, EvalDiagnostics)> {
    if !(tol > 0.0) {
        return Err(domain("series tolerance must be positive"));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(domain("non-finite argument"));
    }
    let r = z.norm();
    if r > order.series_radius() * (1.0 + 1e-12) {
        return Err(domain(format!(
            "|z| = {r} exceeds the series radius {} for alpha = {}",
            order.series_radius(),
            order.get()
        )));
    }
    if r == 0.0 {
        return Ok((Complex64::new(1.0, 0.0), EvalDiagnostics::new(EvalMethod::Series, 1, 0.0)));
    }
    if scaled_modulus(order, z) <= F64_SERIES_W_MAX {
        series_f64(order.get(), z, tol)
    } else {
        series_dd(order.get(), z, tol)
    }
}

fn series_f64(alpha: f64, z: Complex64, tol: f64) -> Result<(Complex64, EvalDiagnostics)> {
    let w = z.norm().powf(1.0 / alpha);
    let mut sum = Complex64::new(1.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    let mut max_term: f64 = 1.0;
    let mut k = 1usize;
    loop {
        zk *= z;
        let term = zk * recip_gamma(alpha * k as f64 + 1.0);
        sum += term;
        let mag = term.norm();
        max_term = max_term.max(mag);
        let past_peak = alpha * k as f64 > w;
        if past_peak && mag <= tol * sum.norm().max(f64::MIN_POSITIVE) {
            let est = 4.0 * f64::EPSILON * max_term * (k as f64).sqrt() + 2.0 * mag;
            return Ok((sum, EvalDiagnostics::new(EvalMethod::Series, k + 1, est)));
        }
        if k >= SERIES_TERM_CAP {
            return Err(Error::NonConvergence { terms: k, last: mag });
        }
        k += 1;
    }
}

/// Cached `ln Γ(αk + 1)` in double-double, keyed by the bits of `α`.
fn ln_gamma_table(alpha: f64, len: usize) -> Arc<Vec<Dd>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<Dd>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = alpha.to_bits();
    if let Some(t) = cache.lock().unwrap().get(&key) {
        if t.len() >= len {
            return Arc::clone(t);
        }
    }
    // built outside the lock; a racing thread computes the same values
    let target = len.max(64).next_power_of_two();
    let table: Vec<Dd> = (0..target)
        .map(|k| ln_gamma_dd(Dd::from_prod(alpha, k as f64) + Dd::ONE))
        .collect();
    let table = Arc::new(table);
    let mut guard = cache.lock().unwrap();
    let entry = guard.entry(key).or_insert_with(|| Arc::clone(&table));
    if entry.len() < table.len() {
        *entry = Arc::clone(&table);
    }
    Arc::clone(entry)
}

fn series_dd(alpha: f64, z: Complex64, tol: f64) -> Result<(Complex64, EvalDiagnostics)> {
    let w = z.norm().powf(1.0 / alpha);
    let r2 = Dd::from_prod(z.re, z.re) + Dd::from_prod(z.im, z.im);
    let ln_r = r2.ln().mul_f64(0.5);
    let r = r2.sqrt();
    let unit = CDd { re: Dd::new(z.re) / r, im: Dd::new(z.im) / r };
    // terms decay past alpha*k ~ w; 60 extra e-folds is far below any tol
    let needed = (((w + 60.0) * 2.0) / alpha).ceil() as usize + 16;
    let table = ln_gamma_table(alpha, needed.min(SERIES_TERM_CAP));

    let mut sum = CDd::ONE;
    let mut upow = CDd::ONE;
    let mut max_term: f64 = 1.0;
    let mut k = 1usize;
    loop {
        if k >= table.len() {
            return Err(Error::NonConvergence { terms: k, last: f64::NAN });
        }
        upow = upow * unit;
        let log_mag = ln_r.mul_f64(k as f64) - table[k];
        let mag = log_mag.exp();
        sum = sum + upow.scale(mag);
        let m = mag.to_f64();
        max_term = max_term.max(m);
        let past_peak = alpha * k as f64 > w;
        if past_peak && m <= tol * sum.abs_f64().max(f64::MIN_POSITIVE) {
            // double-double relative precision ~ 2^-104
            let est = 1e-31 * max_term * (k as f64).sqrt() + 2.0 * m;
            let val = Complex64::new(sum.re.to_f64(), sum.im.to_f64());
            return Ok((val, EvalDiagnostics::new(EvalMethod::Series, k + 1, est)));
        }
        k += 1;
    }
}

#[derive(Clone, Copy)]
enum Truncation {
    Fixed(usize),
    Optimal,
}

struct AsymptoticParts {
    value: Complex64,
    terms: usize,
    est_error: f64,
}

fn asymptotic_parts(order: MLOrder, z: Complex64, trunc: Truncation) -> AsymptoticParts {
    let alpha = order.get();
    let r = z.norm();
    let arg = z.arg();
    let theta = order.sector_angle();
    let w = r.powf(1.0 / alpha);

    let mut exp_part = Complex64::new(0.0, 0.0);
    let mut omitted_exp = 0.0;
    if arg.abs() <= theta {
        let z_root = Complex64::from_polar(w, arg / alpha);
        exp_part = z_root.exp() / alpha;
    } else if arg.abs() < (PI * alpha).min(PI) {
        omitted_exp = (w * (arg / alpha).cos()).exp() / alpha;
    }

    let inv_z = z.inv();
    let ln_r = r.ln();
    let mut zpow = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prev_env = f64::INFINITY;
    let mut terms = 0usize;
    let mut tail = 0.0;
    let cap = match trunc {
        Truncation::Fixed(k) => k,
        Truncation::Optimal => ASYMPTOTIC_TERM_CAP,
    };
    for j in 1..=cap {
        zpow *= inv_z;
        let x = alpha * j as f64;
        let coef = recip_gamma(1.0 - x);
        let term = -zpow * coef;
        if !term.re.is_finite() || !term.im.is_finite() {
            break;
        }
        if let Truncation::Optimal = trunc {
            // |1/Γ(1−x)| = |sin πx| Γ(x)/π oscillates; truncate on the smooth
            // envelope |z|^{-j} Γ(x)/π instead of the raw terms
            let env = if x >= 1.0 {
                (ln_gamma(x) - j as f64 * ln_r).exp() / PI
            } else {
                term.norm().max((-(j as f64) * ln_r).exp() / PI)
            };
            if x >= 1.5 && env > prev_env {
                tail = prev_env;
                break;
            }
            if env <= 1e-17 * sum.norm().max(exp_part.norm()) {
                sum += term;
                terms = j;
                tail = env;
                break;
            }
            prev_env = env;
            tail = env;
        }
        sum += term;
        terms = j;
    }

    let est_error = match trunc {
        Truncation::Optimal => 2.0 * tail + omitted_exp,
        Truncation::Fixed(k) => {
            // committed bound: 2 |z|^{-1-k} max_{j ≤ k+2} |1/Γ(1 − αj)|
            let cmax = (1..=k + 2)
                .map(|j| recip_gamma(1.0 - alpha * j as f64).abs())
                .fold(0.0, f64::max);
            2.0 * (-(1.0 + k as f64) * r.ln()).exp() * cmax + omitted_exp
        }
    };
    AsymptoticParts { value: exp_part + sum, terms, est_error }
}

/// Asymptotic expansion of `E_α(z)` with exactly `k` algebraic terms.
pub fn ml_asymptotic(order: MLOrder, z: Complex64, k: usize) -> Result<(Complex64, EvalDiagnostics)> {
    if k == 0 {
        return Err(domain("asymptotic expansion needs at least one term"));
    }
    check_asymptotic_domain(order, z)?;
    let p = asymptotic_parts(order, z, Truncation::Fixed(k));
    Ok((p.value, EvalDiagnostics::new(EvalMethod::Asymptotic, p.terms, p.est_error)))
}

/// Asymptotic expansion truncated at its smallest term.
pub fn ml_asymptotic_optimal(order: MLOrder, z: Complex64) -> Result<(Complex64, EvalDiagnostics)> {
    check_asymptotic_domain(order, z)?;
    let p = asymptotic_parts(order, z, Truncation::Optimal);
    Ok((p.value, EvalDiagnostics::new(EvalMethod::Asymptotic, p.terms, p.est_error)))
}

fn check_asymptotic_domain(order: MLOrder, z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(domain("non-finite argument"));
    }
    let r = z.norm();
    if r < order.asymptotic_radius() * (1.0 - 1e-12) {
        return Err(domain(format!(
            "|z| = {r} is below the asymptotic radius {} for alpha = {}",
            order.asymptotic_radius(),
            order.get()
        )));
    }
    Ok(())
}

/// `E_α(z)` on the whole complex plane.
///
/// `α = 1` returns `exp(z)` directly. Otherwise the series is used for
/// `|z|^{1/α} ≤ 33` and the optimally truncated asymptotic expansion beyond.
pub fn ml_eval(order: MLOrder, z: Complex64) -> Result<(Complex64, EvalDiagnostics)> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(domain("non-finite argument"));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Ok((Complex64::new(1.0, 0.0), EvalDiagnostics::new(EvalMethod::Series, 1, 0.0)));
    }
    if order.get() == 1.0 {
        let v = z.exp();
        return Ok((v, EvalDiagnostics::new(EvalMethod::ClosedForm, 0, 2.0 * f64::EPSILON * v.norm())));
    }
    if scaled_modulus(order, z) <= SWITCH_W {
        ml_series(order, z, 1e-17)
    } else {
        ml_asymptotic_optimal(order, z)
    }
}

/// Convenience wrapper for hot loops: the value of `E_α(z)` only.
///
/// Panics on non-finite input; use [`ml_eval`] to handle that case.
#[inline]
pub fn ml_value(order: MLOrder, z: Complex64) -> Complex64 {
    ml_eval(order, z).expect("Mittag-Leffler evaluation failed").0
}

/// `ln |Γ(αk + 1)|`, exposed for diagnostics.
pub fn series_log_coefficient(order: MLOrder, k: usize) -> f64 {
    ln_gamma(order.get() * k as f64 + 1.0)
}
