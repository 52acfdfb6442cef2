//! Homogeneous Besov norms `‖f‖_{Ḃ^s_{p,q}} = ‖(2^{js} ‖P_j f‖_{L^p})_j‖_{ℓ^q}`
//! over a finite dyadic range.
//!
//! Blocks come from the radial spectrum: `P_j f = [ψ_j f̂]^∨` is sampled on a
//! grid with spacing `π/(8·2^j)` reaching `extent + 200/2^j` (where `ψ_j^∨`
//! has dropped below 1e-9 of its peak), and `‖P_j f‖_{L^p}` is taken from the
//! samples.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::freq::transform::DEFAULT_TOL;
use crate::freq::spline::ComplexSpline;
use crate::freq::{
    fmt17, lp_norm_radial, profile_density, uniform_grid, CutoffProfile, DyadicBand, GridKind, RadialDensity,
    RadialProfile,
};
use crate::kernel::KernelSpec;
use crate::quad::panel_rule;
use crate::specfun::{ml_eval, omega_at_zero};

pub const DEFAULT_J_MIN: i32 = -12;
pub const DEFAULT_J_MAX: i32 = 12;
/// `N|x|` beyond which a band piece is negligible.
const REACH: f64 = 200.0;
/// Out-of-range spectral mass (relative, in `L²`) that triggers a warning.
pub const LEAKAGE_WARN: f64 = 1e-6;
/// Bands whose `L¹` spectral mass is below this fraction of the band's volume
/// times the peak of `|f̂|` are dropped as empty.
const EMPTY_BAND: f64 = 1e-12;

type SpectrumFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A radial function given through its spectrum `f̂(ρ)` (symmetric convention).
#[derive(Clone)]
pub struct Spectrum {
    n: u32,
    g: SpectrumFn,
    /// `f̂` vanishes (to rounding) outside `[lo, hi]`.
    support: (f64, f64),
    /// `|f|` is negligible beyond this radius, apart from the algebraic tail below.
    extent: f64,
    /// Scale on which `f̂` varies.
    smooth: f64,
    /// Bound on `|f̂|`.
    peak: f64,
    /// Extra radius over which `f` decays after `extent` (band-limited inputs).
    decay_len: f64,
    /// Nonzero when `f̂` is not smooth at the origin and `f` has an algebraic
    /// tail out to a few multiples of this radius.
    tail_scale: f64,
}

impl Spectrum {
    pub fn new(
        n: u32,
        g: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        support: (f64, f64),
        extent: f64,
        smooth: f64,
        peak: f64,
    ) -> Result<Self> {
        if n == 0 || !(support.0 >= 0.0 && support.1 > support.0) || !(smooth > 0.0) || !(extent >= 0.0) {
            return Err(invalid("spectrum needs n >= 1, 0 <= lo < hi, extent >= 0 and a positive smoothness scale"));
        }
        Ok(Spectrum { n, g: Arc::new(g), support, extent, smooth, peak, decay_len: 0.0, tail_scale: 0.0 })
    }

    /// `e^{−|x|²/2λ²}`, whose spectrum is `λ^n e^{−λ²ρ²/2}`.
    pub fn gaussian(n: u32, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(invalid(format!("gaussian width must be positive, got {width}")));
        }
        let amp = width.powi(n as i32);
        // e^{−x²/2} < 1e-17 beyond x = 8.9
        Spectrum::new(
            n,
            move |rho| Complex64::new(amp * (-0.5 * (width * rho).powi(2)).exp(), 0.0),
            (0.0, 9.0 / width),
            9.0 * width,
            0.5 / width,
            amp,
        )
    }

    /// The band-limited function with spectrum `ψ_j`.
    pub fn band_bump(n: u32, j: i32, cutoff: CutoffProfile) -> Result<Self> {
        let band = DyadicBand::new(j);
        let nn = band.scale();
        let mut out = Spectrum::new(
            n,
            move |rho| Complex64::new(cutoff.psi(j, rho), 0.0),
            band.support(),
            0.0,
            2.0 * nn * cutoff.smooth_scale(),
            1.0,
        )?;
        out.decay_len = REACH / nn;
        Ok(out)
    }

    /// Spectrum of a sampled profile, tabulated at 32 points per period of
    /// its fastest oscillation `2π/extent` and spline-interpolated.
    /// Frequencies above the grid's Nyquist limit `π / max Δr` are not
    /// represented by the samples, and those where `|f̂|` is below the
    /// transform tolerance are indistinguishable from zero; both are dropped.
    pub fn from_profile(f: &RadialProfile) -> Result<Self> {
        let radii = f.radii();
        let peak = f.max_abs();
        let last = (f.values().iter().rposition(|v| v.norm() > 1e-15 * peak).unwrap_or(0) + 1).min(radii.len() - 1);
        let extent = radii[last].max(radii[0]);
        let h = radii[..=last].windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let hi = if h > 0.0 { PI / h } else { 1.0 };
        let density = profile_density(f);
        // values within the quadrature tolerance of zero are noise: a coarse
        // pass finds where f̂ is last above it, the fine table stops there
        let noise = 10.0 * DEFAULT_TOL * density.mass();
        let coarse = uniform_grid(0.0, hi, ((hi * extent.max(1e-300) / PI).ceil() as usize).max(4) + 1);
        let scan = density.transform(&coarse, DEFAULT_TOL)?;
        let top = scan.iter().rposition(|v| v.value.norm() > noise).map_or(1, |i| (i + 1).min(coarse.len() - 1));
        let hi = coarse[top];
        let step = PI / (16.0 * extent.max(1e-300));
        let m = ((hi / step).ceil() as usize).max(4);
        let nodes = uniform_grid(0.0, hi, m + 1);
        let values: Vec<Complex64> = density.transform(&nodes, DEFAULT_TOL)?.iter().map(|v| v.value).collect();
        let bound = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let keep = values.iter().rposition(|v| v.norm() > noise).map_or(4, |i| (i + 4).min(m));
        let hi = nodes[keep];
        let spline = ComplexSpline::new(&nodes[..=keep], &values[..=keep]);
        Spectrum::new(
            f.dim(),
            move |rho| if rho <= hi { spline.eval(rho) } else { Complex64::new(0.0, 0.0) },
            (0.0, hi),
            extent,
            PI / (4.0 * extent.max(1e-300)),
            bound,
        )
    }

    /// Spectrum of `T_t f`: multiplied by `E_α(−it^α ρ^β)`.
    pub fn evolve(&self, spec: KernelSpec, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() || spec.n != self.n {
            return Err(invalid(format!("evolution needs t >= 0 and matching dimension, got t = {t}")));
        }
        let (alpha, beta) = (spec.alpha.get(), spec.beta);
        let s = t.powf(alpha);
        let order = spec.alpha;
        let g = self.g.clone();
        let (lo, hi) = self.support;
        // the exponential part of E_α moves mass outwards at its phase rate
        let rate = (0..=256)
            .map(|i| crate::kernel::exp_phase_rate(alpha, beta, s, lo + (hi - lo) * i as f64 / 256.0))
            .fold(0.0, f64::max);
        let mut smooth = self.smooth;
        if rate > 0.0 {
            smooth = smooth.min(0.5 * PI / rate);
        }
        let mut out = Spectrum::new(
            self.n,
            move |rho| {
                let v = g(rho);
                if v == Complex64::new(0.0, 0.0) {
                    return v;
                }
                let z = Complex64::new(0.0, -s * rho.powf(beta));
                ml_eval(order, z).map(|(e, _)| e * v).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            },
            self.support,
            self.extent + rate,
            smooth,
            self.peak,
        )?;
        out.decay_len = self.decay_len;
        if lo == 0.0 && t > 0.0 {
            out.tail_scale = self.tail_scale.max(t.powf(alpha / beta));
        }
        Ok(out)
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn value(&self, rho: f64) -> Complex64 {
        (self.g)(rho)
    }

    fn density(&self) -> RadialDensity<'static> {
        let g = self.g.clone();
        let (lo, hi) = self.support;
        RadialDensity::new(self.n, move |r| g(r), vec![lo, hi], self.smooth.min(hi - lo), lo == 0.0 && self.tail_scale > 0.0)
    }

    /// Radii on which `f` is resolved: spacing `π/(8 hi)` out to where its
    /// smooth part has decayed, then geometric (ratio 1.02) through the
    /// algebraic tail.
    pub fn sample_grid(&self) -> Vec<f64> {
        let hi = self.support.1;
        let core = (self.extent + self.decay_len).max(1.0 / hi);
        let dr = PI / (8.0 * hi);
        let m = ((core / dr).ceil() as usize).max(2);
        let mut grid = uniform_grid(0.0, m as f64 * dr, m + 1);
        if self.tail_scale > 0.0 {
            let reach = core + 50.0 * self.tail_scale;
            let mut r = *grid.last().unwrap();
            while r < reach {
                r = (r * 1.02).max(r + dr);
                grid.push(r);
            }
        }
        grid
    }

    /// `f` on [`Self::sample_grid`].
    pub fn sample(&self) -> Result<RadialProfile> {
        let grid = self.sample_grid();
        self.density().with_floor(1e-3 * DEFAULT_TOL * self.scale()).transform_profile(&grid, DEFAULT_TOL)
    }

    fn scale(&self) -> f64 {
        let hi = self.support.1;
        self.peak * omega_at_zero(self.n) * hi.powi(self.n as i32) / self.n as f64
    }

    /// `P_j f` on a band-adapted grid, or `None` when `ψ_j f̂` is negligible.
    pub fn band_piece(&self, band: DyadicBand, cutoff: &CutoffProfile) -> Result<Option<RadialProfile>> {
        self.bands_piece(band.j, band.j, cutoff)
    }

    /// `Σ_{k=j_lo}^{j_hi} P_k f`, whose multiplier is `φ(ρ/2^{j_hi}) − φ(ρ/2^{j_lo−1})`.
    pub fn bands_piece(&self, j_lo: i32, j_hi: i32, cutoff: &CutoffProfile) -> Result<Option<RadialProfile>> {
        if j_lo > j_hi {
            return Err(invalid(format!("empty band range [{j_lo}, {j_hi}]")));
        }
        let (lo, hi) = self.support;
        let (blo, bhi) = (2f64.powi(j_lo - 1), 2f64.powi(j_hi + 1));
        if bhi <= lo || blo >= hi {
            return Ok(None);
        }
        let (n_lo, n_hi) = (2f64.powi(j_lo), 2f64.powi(j_hi));
        // panels must not straddle the edges of f̂'s support or the bump joints
        let (a, b) = (blo.max(lo), bhi.min(hi));
        let mut breaks = vec![a];
        breaks.extend((j_lo..=j_hi).map(|k| 2f64.powi(k)).filter(|&e| e > a && e < b));
        breaks.push(b);
        let g = self.g.clone();
        let c = *cutoff;
        let (top, bottom) = (n_hi, 0.5 * n_lo);
        let density = RadialDensity::new(
            self.n,
            move |rho| {
                let w = c.phi(rho / top) - c.phi(rho / bottom);
                if w == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    g(rho) * w
                }
            },
            breaks,
            (2.0 * n_lo * cutoff.smooth_scale()).min(self.smooth),
            false,
        );
        let volume = omega_at_zero(self.n) * bhi.powi(self.n as i32) / self.n as f64;
        let mass = density.mass();
        if mass <= EMPTY_BAND * self.peak * volume {
            return Ok(None);
        }
        let density = density.with_floor(1e-3 * DEFAULT_TOL * mass);
        let dr = PI / (8.0 * n_hi);
        let reach = self.extent + self.decay_len + REACH / n_lo;
        let m = ((reach / dr).ceil() as usize).max(2);
        density.transform_profile(&uniform_grid(0.0, m as f64 * dr, m + 1), DEFAULT_TOL).map(Some)
    }

    /// `‖P_j f‖_{L^p}` for each `p` in `ps` and `j` in the range (empty bands give zeros).
    pub fn block_norms(&self, j_min: i32, j_max: i32, ps: &[f64], cutoff: &CutoffProfile) -> Result<Vec<BlockNorms>> {
        if j_min > j_max {
            return Err(invalid(format!("empty dyadic range [{j_min}, {j_max}]")));
        }
        let js: Vec<i32> = (j_min..=j_max).collect();
        crate::par_map(&js, |&j| -> Result<BlockNorms> {
            let lp = match self.band_piece(DyadicBand::new(j), cutoff)? {
                None => vec![0.0; ps.len()],
                Some(piece) => ps.iter().map(|&p| lp_norm_radial(&piece, p).map(|v| v.value)).collect::<Result<_>>()?,
            };
            Ok(BlockNorms { j, lp })
        })
        .into_iter()
        .collect()
    }

    /// Relative `L²` mass of `f` outside the range:
    /// `‖(1 − Σ_j ψ_j) f̂‖₂ / ‖f̂‖₂`.
    pub fn leakage(&self, j_min: i32, j_max: i32, cutoff: &CutoffProfile) -> f64 {
        let (lo, hi) = self.support;
        let top = 2f64.powi(j_max);
        let bottom = 2f64.powi(j_min - 1);
        let nm1 = self.n as i32 - 1;
        let (mut out, mut all) = (0.0, 0.0);
        let mut acc = |a: f64, b: f64| {
            if b <= a {
                return;
            }
            for (r, w) in panel_rule(a, b, self.smooth.min(b - a), 16) {
                let v = (self.g)(r).norm_sqr() * r.powi(nm1) * w;
                let inside = cutoff.phi(r / top) - cutoff.phi(r / bottom);
                all += v;
                out += v * (1.0 - inside).powi(2);
            }
        };
        // break at the range edges so panels see the cutoff transitions
        let mut cuts = vec![lo, hi];
        for e in [bottom, 2.0 * bottom, top, 2.0 * top] {
            if e > lo && e < hi {
                cuts.push(e);
            }
        }
        cuts.sort_by(|a, b| a.total_cmp(b));
        for w in cuts.windows(2) {
            acc(w[0], w[1]);
        }
        if all > 0.0 {
            (out / all).sqrt()
        } else {
            0.0
        }
    }
}

/// `‖P_j f‖_{L^p}` for a list of `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockNorms {
    pub j: i32,
    pub lp: Vec<f64>,
}

/// `Ḃ^s_{p,q}` over `j_min..=j_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub j_min: i32,
    pub j_max: i32,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        Self::with_range(s, p, q, DEFAULT_J_MIN, DEFAULT_J_MAX)
    }

    pub fn with_range(s: f64, p: f64, q: f64, j_min: i32, j_max: i32) -> Result<Self> {
        let spec = BesovSpec { s, p, q, j_min, j_max };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() || !(self.p >= 1.0) || !(self.q >= 1.0) || self.j_min > self.j_max {
            return Err(invalid(format!(
                "Besov spec needs finite s, p, q in [1, ∞] and j_min <= j_max, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// One row of the per-band table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandBlock {
    pub j: i32,
    pub two_pow_js: f64,
    pub block_lp: f64,
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovNorm {
    pub value: f64,
    pub blocks: Vec<BandBlock>,
    /// See [`Spectrum::leakage`].
    pub leakage: f64,
    pub warning: Option<String>,
}

/// `ℓ^q` combination of `2^{js} b_j`.
pub fn combine(blocks: &[(i32, f64)], s: f64, q: f64) -> (f64, Vec<BandBlock>) {
    let rows: Vec<BandBlock> = blocks
        .iter()
        .map(|&(j, b)| {
            let w = 2f64.powf(j as f64 * s);
            BandBlock { j, two_pow_js: w, block_lp: b, weighted: w * b }
        })
        .collect();
    let value = if q.is_infinite() {
        rows.iter().map(|r| r.weighted).fold(0.0, f64::max)
    } else {
        // scale by the largest entry so large q cannot overflow
        let m = rows.iter().map(|r| r.weighted).fold(0.0, f64::max);
        if m == 0.0 {
            0.0
        } else {
            m * rows.iter().map(|r| (r.weighted / m).powf(q)).sum::<f64>().powf(1.0 / q)
        }
    };
    (value, rows)
}

/// Besov norm of a function given by its spectrum.
pub fn besov_norm_spectrum(f: &Spectrum, spec: &BesovSpec, cutoff: &CutoffProfile) -> Result<BesovNorm> {
    spec.validate()?;
    let blocks = f.block_norms(spec.j_min, spec.j_max, &[spec.p], cutoff)?;
    let pairs: Vec<(i32, f64)> = blocks.iter().map(|b| (b.j, b.lp[0])).collect();
    let (value, blocks) = combine(&pairs, spec.s, spec.q);
    let leakage = f.leakage(spec.j_min, spec.j_max, cutoff);
    let warning = (leakage > LEAKAGE_WARN).then(|| {
        format!("spectrum has relative L² mass {leakage:.3e} outside bands {}..={}", spec.j_min, spec.j_max)
    });
    Ok(BesovNorm { value, blocks, leakage, warning })
}

/// `‖f‖_{Ḃ^s_{p,q}}` of a sampled profile with its per-band table.
pub fn besov_norm(f: &RadialProfile, spec: &BesovSpec) -> Result<BesovNorm> {
    besov_norm_with_cutoff(f, spec, &CutoffProfile::default())
}

pub fn besov_norm_with_cutoff(f: &RadialProfile, spec: &BesovSpec, cutoff: &CutoffProfile) -> Result<BesovNorm> {
    besov_norm_spectrum(&Spectrum::from_profile(f)?, spec, cutoff)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub q1: f64,
    pub q2: f64,
    pub norm_q1: f64,
    pub norm_q2: f64,
    pub pass: bool,
}

/// `‖f‖_{Ḃ^s_{p,q2}} ≤ ‖f‖_{Ḃ^s_{p,q1}}` for `q1 ≤ q2` (ℓ^q nesting).
pub fn lq_monotonicity_check(f: &RadialProfile, s: f64, p: f64, q1: f64, q2: f64, j_min: i32, j_max: i32) -> Result<MonotonicityReport> {
    if !(q1 <= q2) {
        return Err(invalid(format!("need q1 <= q2, got {q1} > {q2}")));
    }
    BesovSpec::with_range(s, p, q1, j_min, j_max)?;
    BesovSpec::with_range(s, p, q2, j_min, j_max)?;
    let blocks = Spectrum::from_profile(f)?.block_norms(j_min, j_max, &[p], &CutoffProfile::default())?;
    let pairs: Vec<(i32, f64)> = blocks.iter().map(|b| (b.j, b.lp[0])).collect();
    let (a, _) = combine(&pairs, s, q1);
    let (b, _) = combine(&pairs, s, q2);
    Ok(MonotonicityReport { q1, q2, norm_q1: a, norm_q2: b, pass: b <= a * (1.0 + 1e-10) })
}

pub const BESOV_CSV_HEADER: &str = "j,two_pow_js,block_lp,weighted";

pub fn write_besov_csv<W: Write>(mut w: W, blocks: &[BandBlock]) -> std::io::Result<()> {
    writeln!(w, "{BESOV_CSV_HEADER}")?;
    for b in blocks {
        writeln!(w, "{},{},{},{}", b.j, fmt17(b.two_pow_js), fmt17(b.block_lp), fmt17(b.weighted))?;
    }
    Ok(())
}

/// Samples a profile on a uniform grid (helper for callers building inputs).
pub fn profile_on_grid(n: u32, r_max: f64, points: usize, f: impl Fn(f64) -> Complex64) -> Result<RadialProfile> {
    RadialProfile::from_fn(n, uniform_grid(0.0, r_max, points), GridKind::Uniform, f)
}
