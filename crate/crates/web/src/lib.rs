//! Browser bindings for three operations: the Mittag-Leffler function, a
//! band-kernel profile and a time-decay sweep with its fitted exponent.
//!
//! Each export is a thin wrapper over a plain function returning
//! `Result<_, String>`, so the logic is testable off the browser.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use num_complex::Complex64;
use tfse_core::estimates::{decay_sweep, dyadic, fit_exponent, ASYMPTOTIC_THRESHOLD};
use tfse_core::freq::{log_grid, uniform_grid};
use tfse_core::kernel::{BandKernel, KernelSpec};
use tfse_core::specfun::{ml_eval, MLOrder};
use wasm_bindgen::prelude::*;

fn spec(n: u32, alpha: f64, beta: f64) -> Result<KernelSpec, String> {
    KernelSpec::new(n, alpha, beta).map_err(|e| e.to_string())
}

/// `[re, im, est_error]` of `E_α(z)`.
pub fn ml_value(alpha: f64, re: f64, im: f64) -> Result<Vec<f64>, String> {
    let order = MLOrder::new(alpha).map_err(|e| e.to_string())?;
    let (v, d) = ml_eval(order, Complex64::new(re, im)).map_err(|e| e.to_string())?;
    Ok(vec![v.re, v.im, d.est_error])
}

/// `[x_0, re_0, im_0, x_1, …]` for `K_t^N` on `points` uniform radii in `[0, x_max]`.
pub fn band_profile(n: u32, alpha: f64, beta: f64, t: f64, nn: f64, x_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(x_max > 0.0) || !(2..=4096).contains(&points) {
        return Err("need x_max > 0 and 2..=4096 points".into());
    }
    let band = dyadic(nn).map_err(|e| e.to_string())?;
    let k = BandKernel::new(spec(n, alpha, beta)?, t, band).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * points);
    for x in uniform_grid(0.0, x_max, points) {
        let v = k.at(x).map_err(|e| e.to_string())?.value;
        out.extend([x, v.re, v.im]);
    }
    Ok(out)
}

/// `[slope, r², t_0, sup_0, t_1, …]`: `sup_x |K_t^N|` on a log grid in `t`,
/// fitted over the cells with `t^α N^β ≥ 10` (slope NaN when fewer than three).
pub fn time_decay(n: u32, alpha: f64, beta: f64, nn: f64, t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(t_min > 0.0 && t_min < t_max) || !(3..=64).contains(&points) {
        return Err("need 0 < t_min < t_max and 3..=64 points".into());
    }
    let records = decay_sweep(spec(n, alpha, beta)?, &log_grid(t_min, t_max, points), &[nn], 256).map_err(|e| e.to_string())?;
    let pts: Vec<(f64, f64)> =
        records.iter().filter(|r| r.ok() && r.t_alpha_n_beta >= ASYMPTOTIC_THRESHOLD && r.sup_k > 0.0).map(|r| (r.t, r.sup_k)).collect();
    let (slope, r2) = fit_exponent(&pts).map(|f| (f.slope, f.r_squared)).unwrap_or((f64::NAN, f64::NAN));
    let mut out = vec![slope, r2];
    for r in &records {
        out.extend([r.t, r.sup_k]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = mlEval)]
pub fn ml_eval_js(alpha: f64, re: f64, im: f64) -> Result<Vec<f64>, JsError> {
    ml_value(alpha, re, im).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = bandProfile)]
pub fn band_profile_js(n: u32, alpha: f64, beta: f64, t: f64, nn: f64, x_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    band_profile(n, alpha, beta, t, nn, x_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = timeDecay)]
pub fn time_decay_js(n: u32, alpha: f64, beta: f64, nn: f64, t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    time_decay(n, alpha, beta, nn, t_min, t_max, points).map_err(|e| JsError::new(&e))
}
