//! Natural cubic splines on strictly increasing knots.

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    /// Natural spline (zero second derivative at both ends).
    ///
    /// Panics unless `x` is strictly increasing and `x.len() == y.len() ≥ 2`.
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        Self::build(x, y, None, None)
    }

    /// Clamped spline with prescribed end slopes.
    pub fn clamped(x: &[f64], y: &[f64], slope0: f64, slope1: f64) -> Self {
        Self::build(x, y, Some(slope0), Some(slope1))
    }

    /// Clamped spline; slope zero at `x = 0` (even extension of a radial
    /// function), otherwise estimated from the four nearest samples.
    pub fn radial(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        if n < 4 {
            return Self::new(x, y);
        }
        let s0 = if x[0] == 0.0 { 0.0 } else { end_slope(&x[..4], &y[..4]) };
        let xs: Vec<f64> = x[n - 4..].iter().rev().copied().collect();
        let ys: Vec<f64> = y[n - 4..].iter().rev().copied().collect();
        let s1 = end_slope(&xs, &ys);
        Self::clamped(x, y, s0, s1)
    }

    fn build(x: &[f64], y: &[f64], s0: Option<f64>, s1: Option<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n, "spline needs matching abscissae and ordinates");
        // tridiagonal system a_i m_{i-1} + b_i m_i + c_i m_{i+1} = d_i
        let mut a = vec![0.0; n];
        let mut b = vec![1.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        if let Some(s) = s0 {
            let h = x[1] - x[0];
            b[0] = h / 3.0;
            c[0] = h / 6.0;
            d[0] = (y[1] - y[0]) / h - s;
        }
        if let Some(s) = s1 {
            let h = x[n - 1] - x[n - 2];
            a[n - 1] = h / 6.0;
            b[n - 1] = h / 3.0;
            d[n - 1] = s - (y[n - 1] - y[n - 2]) / h;
        }
        // Thomas algorithm
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = c[0] / b[0];
        dp[0] = d[0] / b[0];
        for i in 1..n {
            let den = b[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / den;
            dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
        }
        let mut m = vec![0.0; n];
        m[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = dp[i] - cp[i] * m[i + 1];
        }
        CubicSpline { x: x.to_vec(), y: y.to_vec(), m }
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    /// Value at `t`; constant extension outside the knot range.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.x.partition_point(|&v| v <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// Derivative at `x[0]` of the cubic through four points.
fn end_slope(x: &[f64], y: &[f64]) -> f64 {
    let x0 = x[0];
    let mut s = 0.0;
    for i in 0..4 {
        let li = if i == 0 {
            (1..4).map(|k| 1.0 / (x0 - x[k])).sum::<f64>()
        } else {
            let num: f64 = (1..4).filter(|&k| k != i).map(|k| x0 - x[k]).product();
            let den: f64 = (0..4).filter(|&k| k != i).map(|k| x[i] - x[k]).product();
            num / den
        };
        s += y[i] * li;
    }
    s
}

/// Spline through complex samples (real and imaginary parts separately).
#[derive(Debug, Clone)]
pub struct ComplexSpline {
    re: CubicSpline,
    im: CubicSpline,
}

impl ComplexSpline {
    pub fn new(x: &[f64], v: &[Complex64]) -> Self {
        let re: Vec<f64> = v.iter().map(|c| c.re).collect();
        let im: Vec<f64> = v.iter().map(|c| c.im).collect();
        ComplexSpline { re: CubicSpline::radial(x, &re), im: CubicSpline::radial(x, &im) }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        Complex64::new(self.re.eval(t), self.im.eval(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_lines() {
        let x = [0.0, 0.3, 1.0, 2.5, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let s = CubicSpline::new(&x, &y);
        for (a, b) in x.iter().zip(&y) {
            assert!((s.eval(*a) - b).abs() < 1e-15);
        }
        assert!((s.eval(1.7) - 2.4).abs() < 1e-14);
    }

    #[test]
    fn fourth_order_on_smooth_data() {
        let x: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let s = CubicSpline::new(&x, &y);
        let err = (0..1000)
            .map(|i| 0.5 + i as f64 * 0.009)
            .map(|t| (s.eval(t) - t.sin()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn radial_spline_is_fourth_order_up_to_the_origin() {
        let x: Vec<f64> = (0..=100).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = x.iter().map(|v| (-0.5 * v * v).exp()).collect();
        let s = CubicSpline::radial(&x, &y);
        let err = (0..2000)
            .map(|i| i as f64 * 0.0025)
            .map(|t| (s.eval(t) - (-0.5 * t * t).exp()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }
}
