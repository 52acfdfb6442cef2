//! Special functions: Gamma, Mittag-Leffler, Bessel.

pub mod bessel;
pub mod dd;
pub mod gamma;
pub mod mittag_leffler;

use serde::{Deserialize, Serialize};

pub use bessel::{bessel_j, omega_at_zero, omega_n};
pub use gamma::{gamma_real, ln_gamma, recip_gamma};
pub use mittag_leffler::{ml_asymptotic, ml_asymptotic_optimal, ml_eval, ml_series, ml_value, MLOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMethod {
    Series,
    Asymptotic,
    PoissonQuadrature,
    ClosedForm,
    Quadrature,
}

/// How a value was computed and a conservative absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalDiagnostics {
    pub method: EvalMethod,
    pub terms_or_nodes: usize,
    pub est_error: f64,
}

impl EvalDiagnostics {
    pub fn new(method: EvalMethod, terms_or_nodes: usize, est_error: f64) -> Self {
        EvalDiagnostics { method, terms_or_nodes, est_error }
    }
}
