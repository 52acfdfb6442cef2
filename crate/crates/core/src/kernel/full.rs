//! `K_t(x) = ∫ E_α(−it^α|ξ|^β) e^{ix·ξ} dξ` and its small-`x` expansion.
//!
//! The radial integral is split at `R_t`, where `w = (t^α R_t^β)^{1/α}` is
//! large enough for `E_α(−it^α r^β)` to equal its algebraic expansion
//! `Σ_j c_j (t^α r^β)^{−j}`, `c_j = −(−i)^{−j}/Γ(1−αj)`, to rounding. The
//! ball `[0, R_t]` is done by panel quadrature; beyond it each power is
//! integrated against `Ω_n` exactly (see [`omega_moment`]).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::moment::omega_moment;
use super::{exp_phase_rate, KernelSample, KernelSpec, Normalization, Regime};
use crate::error::{domain, Result};
use crate::freq::{CutoffProfile, RadialDensity};
use crate::quad::panel_rule;
use crate::specfun::{gamma_real, ml_eval, omega_at_zero, omega_n, recip_gamma, EvalDiagnostics, EvalMethod};

const FULL_TOL: f64 = 1e-12;
const MAX_TAIL_TERMS: usize = 200;

/// `c_j = −(−i)^{−j} / Γ(1 − αj)`, the coefficient of `|ξ|^{−βj}` in `E_α(−i|ξ|^β)`.
pub fn expansion_coefficient(alpha: f64, j: usize) -> Complex64 {
    // (−i)^{−j} = i^j
    let ij = match j % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    -ij * recip_gamma(1.0 - alpha * j as f64)
}

/// `w = |z|^{1/α}` beyond which the expansion alone represents `E_α(−i·)`.
fn tail_w(alpha: f64) -> Result<f64> {
    if alpha >= 1.0 {
        return Err(domain("α = 1 has no algebraic tail; the full kernel is purely oscillatory"));
    }
    let mut w: f64 = 40.0;
    if alpha >= 0.5 {
        // the exponential term decays like exp(w cos(π/2α))
        w = w.max(40.0 / (0.5 * PI / alpha).cos().abs());
    }
    Ok(w)
}

/// Splitting radius `R_t`.
pub fn tail_radius(spec: KernelSpec, t: f64) -> Result<f64> {
    let a = spec.alpha.get();
    let z = tail_w(a)?.powf(a);
    Ok((z / t.powf(a)).powf(1.0 / spec.beta))
}

/// `K_t` at fixed `t`.
pub struct FullKernel {
    spec: KernelSpec,
    t: f64,
    radius: f64,
    /// `c_j (t^α R_t^β)^{−j}`, `j = 1..`
    coef: Vec<Complex64>,
    tail_bound: f64,
    density: RadialDensity<'static>,
}

impl FullKernel {
    pub fn new(spec: KernelSpec, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(domain(format!("time must be positive, got {t}")));
        }
        let (n, alpha, beta) = (spec.n, spec.alpha.get(), spec.beta);
        let radius = tail_radius(spec, t)?;
        let s = t.powf(alpha);
        let zr = s * radius.powf(beta);
        let nf = n as f64;
        // truncate once the next term, integrated absolutely over the tail, is negligible
        let mut coef = Vec::new();
        let mut tail_bound = f64::INFINITY;
        let mut best = f64::INFINITY;
        for j in 1..=MAX_TAIL_TERMS {
            let cj = expansion_coefficient(alpha, j);
            let next = j + 1;
            let e = beta * next as f64 - nf;
            let env = gamma_real(alpha * next as f64).unwrap_or(f64::INFINITY) / PI * zr.powi(-(next as i32));
            coef.push(cj * zr.powi(-(j as i32)));
            if e > 0.5 {
                let b = 2.0 * env * omega_at_zero(n) * radius.powf(nf) / e;
                tail_bound = b;
                if env * omega_at_zero(n) / e <= 1e-16 {
                    break;
                }
            }
            if env > best {
                break;
            }
            best = env;
        }
        // what is left of the exponential term beyond R_t
        if alpha >= 0.5 {
            let wr = zr.powf(1.0 / alpha);
            let decay = (0.5 * PI / alpha).cos().abs() * wr;
            tail_bound += (-decay).exp() / alpha * omega_at_zero(n) * radius.powf(nf) * alpha / (beta * decay);
        }
        let rate = (1..=128).map(|i| exp_phase_rate(alpha, beta, s, radius * i as f64 / 128.0)).fold(0.0, f64::max);
        let mut h = radius / 16.0;
        if rate > 0.0 {
            h = h.min(0.5 * PI / rate);
        }
        let order = spec.alpha;
        let density = RadialDensity::new(
            n,
            move |r| {
                let z = Complex64::new(0.0, -s * r.powf(beta));
                ml_eval(order, z).map(|(e, _)| e).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            },
            vec![0.0, radius],
            h,
            true,
        );
        Ok(FullKernel { spec, t, radius, coef, tail_bound, density })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Number of expansion terms used beyond `R_t`.
    pub fn tail_terms(&self) -> usize {
        self.coef.len()
    }

    pub fn at(&self, x_radius: f64) -> Result<KernelSample> {
        let x = x_radius.abs();
        let (n, beta) = (self.spec.n, self.spec.beta);
        let nf = n as f64;
        if x == 0.0 && beta <= nf {
            return Err(domain("K_t is unbounded at x = 0 when β ≤ n"));
        }
        let ball = self.density.hankel(x, FULL_TOL)?;
        let mut tail = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (i, c) in self.coef.iter().enumerate() {
            let j = (i + 1) as f64;
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            // ∫_R^∞ r^{n−1−βj} Ω_n(rx) dr = R^{n−βj} (Rx)^{βj−n} M_n(n−1−βj, Rx)
            let e = beta * j - nf;
            let (m, me) = if x == 0.0 {
                (omega_at_zero(n) / e, 0.0)
            } else {
                let a = self.radius * x;
                let (m, me) = omega_moment(n, nf - 1.0 - beta * j, a)?;
                let sc = a.powf(e);
                (m * sc, me * sc)
            };
            tail += c * m;
            err += c.norm() * me;
        }
        let rn = self.radius.powf(nf);
        tail *= rn;
        err = err * rn + ball.est_error;
        let factor = self.spec.radial_factor();
        let total = (ball.value + tail) * factor;
        err = (err + self.tail_bound) * factor;
        Ok(KernelSample {
            t: self.t,
            band_scale: None,
            x_radius: x,
            value: total,
            diagnostics: EvalDiagnostics::new(EvalMethod::Quadrature, ball.nodes, err),
            panels: ball.nodes / 16,
            tail_bound: self.tail_bound * factor,
        })
    }

    /// `(x*, max |K_t|)` over `x_grid`.
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

/// `K_t(x)`; see [`FullKernel`] for repeated evaluation at one `t`.
pub fn kernel_full(spec: KernelSpec, t: f64, x_radius: f64) -> Result<KernelSample> {
    FullKernel::new(spec, t)?.at(x_radius)
}

/// `C(n, θ)` with `∫ |ξ|^{−θ} e^{ix·ξ} dξ = C |x|^{θ−n}`, `0 < θ < n`.
pub fn riesz_constant(n: u32, theta: f64) -> Result<f64> {
    let nf = n as f64;
    if !(theta > 0.0 && theta < nf) {
        return Err(domain(format!("Riesz constant needs 0 < θ < n, got θ = {theta}, n = {n}")));
    }
    Ok(2f64.powf(nf - theta) * PI.powf(0.5 * nf) * gamma_real(0.5 * (nf - theta))? / gamma_real(0.5 * theta)?)
}

/// Indices `k` of the power terms `C_k |x|^{βk−n} t^{−αk}` in the expansion:
/// all `βk < n`, except that the resonant `βk = n` term is logarithmic.
fn power_terms(spec: &KernelSpec) -> Vec<usize> {
    let nf = spec.n as f64;
    match spec.regime() {
        Regime::Subcritical => vec![],
        Regime::Resonant { m } => (1..m as usize).collect(),
        Regime::CriticalOrSuper => (1..).take_while(|&k| spec.beta * k as f64 <= nf).collect(),
    }
}

/// `Σ_k C_k |x|^{βk−n} t^{−αk}` with `C_k = C(n, βk) c_k`.
pub fn expansion_sum(spec: KernelSpec, t: f64, x_radius: f64) -> Result<Complex64> {
    let (alpha, beta, nf) = (spec.alpha.get(), spec.beta, spec.n as f64);
    let conv = match spec.normalization {
        Normalization::PaperUnnormalized => 1.0,
        Normalization::Symmetric => 1.0 / spec.radial_factor(),
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for k in power_terms(&spec) {
        let kf = k as f64;
        let ck = riesz_constant(spec.n, beta * kf)? * conv;
        sum += expansion_coefficient(alpha, k) * ck * x_radius.powf(beta * kf - nf) * t.powf(-alpha * kf);
    }
    Ok(sum)
}

/// `|K_t(x) − Σ_k C_k |x|^{βk−n} t^{−αk}| · t^{nα/β}`.
pub fn expansion_residual(spec: KernelSpec, t: f64, x_radius: f64) -> Result<f64> {
    if !(x_radius > 0.0) {
        return Err(domain("expansion residual needs x > 0"));
    }
    let k = kernel_full(spec, t, x_radius)?;
    let sub = expansion_sum(spec, t, x_radius)?;
    Ok((k.value - sub).norm() * t.powf(spec.decay_power()))
}

/// `W_1(η) = ∫ |ξ|^{−n} Φ(|ξ|) e^{iη·ξ} dξ` with `Φ = 1 − φ`, `0 < η ≤ 1/2`.
pub fn w1_eval(n: u32, eta: f64) -> Result<Complex64> {
    if !(eta > 0.0 && eta <= 0.5) {
        return Err(domain(format!("W_1 needs 0 < η <= 1/2, got {eta}")));
    }
    let cut = CutoffProfile::default();
    let mut inner = 0.0;
    for (r, w) in panel_rule(1.0, 2.0, 1.0 / 64.0, 16) {
        inner += w * cut.exterior(r) / r * omega_n(n, r * eta);
    }
    // Φ = 1 on [2, ∞): ∫_{2η}^∞ u^{−1} Ω_n(u) du
    let (outer, _) = omega_moment(n, -1.0, 2.0 * eta)?;
    Ok(Complex64::new(Normalization::PaperUnnormalized.radial_factor(n) * (inner + outer), 0.0))
}
