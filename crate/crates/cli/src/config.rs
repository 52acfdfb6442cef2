//! Run configuration: a TOML file plus flag overrides (flags win).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tfse_core::freq::log_grid;
use tfse_core::kernel::KernelSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpecConfig {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for SpecConfig {
    fn default() -> Self {
        SpecConfig { n: 1, alpha: 0.5, beta: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Log grid `[t_min, t_max]` with `t_points` entries.
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    /// Fixed time for the `N`-scaling check.
    pub t_fixed: f64,
    /// Band scales, powers of two.
    pub n_values: Vec<f64>,
    pub x_points: usize,
    pub j_min: i32,
    pub j_max: i32,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            t_min: 1e2,
            t_max: 1e4,
            t_points: 9,
            t_fixed: 1e4,
            n_values: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
            x_points: tfse_core::estimates::DEFAULT_X_POINTS,
            j_min: tfse_core::besov::DEFAULT_J_MIN,
            j_max: tfse_core::besov::DEFAULT_J_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Slope tolerance of the fitted exponents.
    pub slope: f64,
    pub min_r_squared: f64,
    /// Largest max/min of the sharpness constants and expansion residuals.
    pub max_spread: f64,
    /// Largest max/min of the dispersive Besov ratios.
    pub besov_spread: f64,
    pub scaling_defect: f64,
    /// Required gain of the subtracted expansion over the raw kernel.
    pub expansion_gain: f64,
    pub w1_change: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            slope: 0.05,
            min_r_squared: 0.99,
            max_spread: 10.0,
            besov_spread: 100.0,
            scaling_defect: 1e-8,
            expansion_gain: 10.0,
            w1_change: 0.05,
        }
    }
}

/// Inputs of the dispersive checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersiveConfig {
    pub r_values: Vec<f64>,
    /// Regularity and summability of the Besov-to-Besov estimate.
    pub s: f64,
    pub p: f64,
    pub gaussian_width: f64,
    /// Band of the band-limited input.
    pub bump_j: i32,
    pub p_values: Vec<f64>,
}

impl Default for DispersiveConfig {
    fn default() -> Self {
        DispersiveConfig {
            r_values: vec![2.0, 4.0, f64::INFINITY],
            s: 1.0,
            p: 2.0,
            gaussian_width: 1.0,
            bump_j: 0,
            p_values: vec![2.0, 4.0, f64::INFINITY],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OdeConfig {
    pub lambda: Vec<f64>,
    pub t: Vec<f64>,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig { lambda: vec![1.0, 4.0], t: vec![0.5, 1.0, 2.0] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub spec: SpecConfig,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub dispersive: DispersiveConfig,
    pub ode: OdeConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        Ok(KernelSpec::new(self.spec.n, self.spec.alpha, self.spec.beta)?)
    }

    pub fn t_grid(&self) -> Vec<f64> {
        let g = &self.grid;
        if g.t_points == 1 {
            vec![g.t_min]
        } else {
            log_grid(g.t_min, g.t_max, g.t_points)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel_spec()?;
        let g = &self.grid;
        if !(g.t_min > 0.0 && g.t_min <= g.t_max && g.t_max.is_finite()) || g.t_points == 0 {
            bail!("time grid needs 0 < t_min <= t_max and t_points >= 1");
        }
        if !(g.t_fixed > 0.0) || !g.t_fixed.is_finite() {
            bail!("t_fixed must be positive");
        }
        if g.n_values.is_empty() || g.x_points == 0 {
            bail!("n_values and x_points must be nonempty");
        }
        for &nn in &g.n_values {
            tfse_core::estimates::dyadic(nn)?;
        }
        if g.j_min > g.j_max {
            bail!("j_min must not exceed j_max");
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("slope", t.slope),
            ("min_r_squared", t.min_r_squared),
            ("max_spread", t.max_spread),
            ("besov_spread", t.besov_spread),
            ("scaling_defect", t.scaling_defect),
            ("expansion_gain", t.expansion_gain),
            ("w1_change", t.w1_change),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                bail!("tolerance {name} must be positive, got {v}");
            }
        }
        let d = &self.dispersive;
        if d.r_values.is_empty() || d.p_values.is_empty() || !(d.gaussian_width > 0.0) {
            bail!("dispersive inputs need r_values, p_values and a positive gaussian_width");
        }
        if self.ode.lambda.is_empty() || self.ode.t.is_empty() {
            bail!("ode needs at least one λ and one t");
        }
        if self.threads == Some(0) {
            bail!("threads must be at least 1");
        }
        Ok(())
    }
}
