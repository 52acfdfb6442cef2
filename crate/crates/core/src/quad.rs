//! Gauss-Legendre quadrature on panels.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

type Rule = (Vec<f64>, Vec<f64>);

/// Gauss-Legendre nodes and weights on `[-1, 1]`, cached per order.
pub fn gauss_legendre(order: usize) -> (&'static [f64], &'static [f64]) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    let rule = *guard
        .entry(order)
        .or_insert_with(|| Box::leak(Box::new(compute_rule(order))));
    (&rule.0, &rule.1)
}

fn compute_rule(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// `∫_a^b f` with `panels` equal Gauss-Legendre panels of the given order.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        let r = 0.5 * h;
        let mut s = 0.0;
        for (&x, &w) in xs.iter().zip(ws) {
            s += w * f(c + r * x);
        }
        total += s * r;
    }
    total
}

/// Quadrature points `(node, weight)` covering `[a, b]` with panels no wider
/// than `max_width`.
pub fn panel_rule(a: f64, b: f64, max_width: f64, order: usize) -> Vec<(f64, f64)> {
    let panels = (((b - a) / max_width).ceil() as usize).max(1);
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        let r = 0.5 * h;
        for (&x, &w) in xs.iter().zip(ws) {
            out.push((c + r * x, w * r));
        }
    }
    out
}

/// Geometrically graded points on `(0, b]`: panels `[b q^{k+1}, b q^k]`.
pub fn graded_rule(b: f64, ratio: f64, levels: usize, order: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(levels * order);
    let mut hi = b;
    for _ in 0..levels {
        let lo = hi * ratio;
        out.extend(panel_rule(lo, hi, hi - lo, order));
        hi = lo;
    }
    out
}

/// `∫ y dx` over sampled data on a strictly increasing, possibly nonuniform
/// grid: composite three-point Simpson, with a quadratic end correction when
/// the number of intervals is odd.
pub fn integrate_samples(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    assert_eq!(n, y.len());
    match n {
        0 | 1 => return 0.0,
        2 => return 0.5 * (x[1] - x[0]) * (y[0] + y[1]),
        _ => {}
    }
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < n {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        total += hs / 6.0 * ((2.0 - h1 / h0) * y[i] + hs * hs / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        // last lone interval [x_{n-2}, x_{n-1}] from the quadratic through the last three points
        let (x0, x1, x2) = (x[n - 3], x[n - 2], x[n - 1]);
        let (h0, h1) = (x1 - x0, x2 - x1);
        total += y[n - 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1))
            + y[n - 2] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0)
            - y[n - 3] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    }
    total
}
