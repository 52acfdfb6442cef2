use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use tfse_core::freq::{
    band_project, log_grid, lp_norm_radial, radial_fourier, uniform_grid, CutoffProfile, DyadicBand, GridKind,
    RadialDensity, RadialProfile,
};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn trapezoid(f: impl Fn(f64) -> Complex64, a: f64, b: f64, m: usize) -> Complex64 {
    let h = (b - a) / m as f64;
    let mut s = (f(a) + f(b)) * 0.5;
    for i in 1..m {
        s += f(a + i as f64 * h);
    }
    s * h
}

#[test]
fn partition_of_unity() {
    let cut = CutoffProfile::default();
    let big_j = 12;
    for r in log_grid(2f64.powi(-big_j + 1), 2f64.powi(big_j - 1), 5000) {
        let s: f64 = (-big_j..=big_j).map(|j| cut.psi(j, r)).sum();
        assert!((s - 1.0).abs() <= 1e-14, "r={r}: {s}");
    }
}

#[test]
fn support_and_scaling_are_exact() {
    let cut = CutoffProfile::default();
    for j in -5..=5 {
        let n = 2f64.powi(j);
        for r in [0.0, 0.1 * n, 0.5 * n, 2.0 * n, 2.5 * n, 40.0 * n] {
            assert_eq!(cut.psi(j, r), 0.0, "j={j} r={r}");
        }
        for i in 0..400 {
            let r = 0.5 * n + i as f64 * 1.5 * n / 400.0;
            assert_eq!(cut.psi(j, r), cut.psi(0, r / n));
        }
    }
}

#[test]
fn three_bump_reproduction() {
    let cut = CutoffProfile::default();
    for nj in -3..=3 {
        let nn = 2f64.powi(nj);
        for i in 0..=2000 {
            let xi = 0.5 * nn + i as f64 * 1.5 * nn / 2000.0;
            if cut.psi(nj, xi) == 0.0 {
                continue;
            }
            let s = cut.psi(0, xi / (2.0 * nn)) + cut.psi(0, xi / nn) + cut.psi(0, 2.0 * xi / nn);
            assert!((s - 1.0).abs() <= 1e-14, "N={nn} xi={xi}: {s}");
        }
    }
}

#[test]
fn gaussian_fixed_point_on_sampled_profile() {
    let grid = uniform_grid(0.0, 14.0, 1401);
    let g = RadialProfile::from_fn(1, grid, GridKind::Uniform, |r| c((-0.5 * r * r).exp())).unwrap();
    let out = uniform_grid(0.0, 6.0, 61);
    let h = radial_fourier(&g, &out).unwrap();
    for (rho, v) in out.iter().zip(h.values()) {
        assert!((v - c((-0.5 * rho * rho).exp())).norm() < 1e-8, "rho={rho}: {v}");
    }
}

#[test]
fn band_limited_plancherel() {
    // f = (ψ_0)^∨ in n = 1 and n = 3; ‖f‖_2 = ‖ψ_0‖_2
    let cut = CutoffProfile::default();
    for n in [1u32, 3] {
        let spec = RadialDensity::new(n, move |r| c(cut.psi0(r)), vec![0.5, 1.0, 2.0], 0.1, false);
        let grid = uniform_grid(0.0, 400.0, 8001);
        let f = spec.transform_profile(&grid, 1e-10).unwrap();
        let lhs = lp_norm_radial(&f, 2.0).unwrap().value;
        let spec_prof =
            RadialProfile::from_fn(n, uniform_grid(0.5, 2.0, 3001), GridKind::Uniform, |r| c(cut.psi0(r))).unwrap();
        let rhs = lp_norm_radial(&spec_prof, 2.0).unwrap().value;
        assert!((lhs / rhs - 1.0).abs() <= 1e-6, "n={n}: {lhs} vs {rhs}");
    }
}

#[test]
fn band_limited_transform_matches_trapezoid_oracle() {
    // n = 1: ∫_0^∞ ψ(ρ) √(2/π) cos(ρ x) dρ by a fine trapezoid
    let cut = CutoffProfile::default();
    let spec = RadialDensity::new(1, move |r| c(cut.psi0(r)), vec![0.5, 1.0, 2.0], 0.1, false);
    for x in [0.0, 0.7, 3.0, 11.0, 40.0] {
        let v = spec.hankel(x, 1e-10).unwrap().value;
        let want = trapezoid(|r| c(cut.psi0(r) * (2.0 / PI).sqrt() * (r * x).cos()), 0.5, 2.0, 200_000);
        assert!((v - want).norm() < 1e-9, "x={x}: {v} vs {want}");
    }
}

#[test]
fn round_trip_smooth_compact() {
    let cut = CutoffProfile::default();
    for n in [1u32, 3] {
        let grid = uniform_grid(0.0, 2.5, 251);
        let f = RadialProfile::from_fn(n, grid.clone(), GridKind::Uniform, |r| c(cut.phi(r))).unwrap();
        let spec_grid = uniform_grid(0.0, 600.0, 12001);
        let fhat = radial_fourier(&f, &spec_grid).unwrap();
        let back = radial_fourier(&fhat, &grid).unwrap();
        let diff = back.add(&f.scale(c(-1.0))).unwrap();
        let rel = lp_norm_radial(&diff, 2.0).unwrap().value / lp_norm_radial(&f, 2.0).unwrap().value;
        assert!(rel <= 1e-6, "n={n}: relative L2 round-trip error {rel:e}");
    }
}

#[test]
fn band_projection_of_gaussian_matches_double_integral() {
    // P_0 f(x) = (2π)^{-1} ∫ψ(ξ) e^{ixξ} ∫ f(y) e^{-iyξ} dy dξ, both by trapezoid
    let cut = CutoffProfile::default();
    let f = RadialProfile::from_fn(1, uniform_grid(0.0, 14.0, 701), GridKind::Uniform, |r| c((-0.5 * r * r).exp()))
        .unwrap();
    let p = band_project(&f, DyadicBand::new(0), &cut).unwrap();
    let fhat = |xi: f64| trapezoid(|y| c((-0.5 * y * y).exp()) * Complex64::from_polar(1.0, -y * xi), -14.0, 14.0, 2800);
    for (k, &x) in p.radii().iter().enumerate().step_by(50) {
        let want = trapezoid(|xi| fhat(xi) * cut.psi0(xi) * Complex64::from_polar(1.0, x * xi), -2.0, 2.0, 1600)
            / (2.0 * PI);
        assert!((p.values()[k] - want).norm() < 1e-8, "x={x}: {} vs {want}", p.values()[k]);
    }
}

#[test]
fn disjoint_band_projects_to_zero() {
    // spectrum exp(-(ρ-1)²/0.02): numerically zero on band 3, and f decays like a Gaussian
    let spec = RadialDensity::new(1, |r| c((-(r - 1.0) * (r - 1.0) / 0.02).exp()), vec![0.0, 1.0, 2.0, 3.0], 0.05, false);
    let f = spec.transform_profile(&uniform_grid(0.0, 80.0, 2001), 1e-12).unwrap();
    let cut = CutoffProfile::default();
    let p = band_project(&f, DyadicBand::new(3), &cut).unwrap();
    assert!(p.max_abs() <= 1e-8 * f.max_abs(), "{}", p.max_abs());
    // while the band holding the bump keeps most of it
    let p0 = band_project(&f, DyadicBand::new(0), &cut).unwrap();
    assert!(p0.max_abs() >= 0.5 * f.max_abs());
}

#[test]
fn bands_telescope() {
    // Σ_{j=-12}^{6} P_j f + P_{<2^-12} f = f for a Gaussian; the low-pass
    // remainder is built from the exact spectrum e^{-ρ²/2}
    let cut = CutoffProfile::default();
    let g = RadialProfile::from_fn(1, uniform_grid(0.0, 14.0, 351), GridKind::Uniform, |r| c((-0.5 * r * r).exp()))
        .unwrap();
    let mut acc = RadialProfile::zeros(1, g.radii().to_vec(), GridKind::Uniform).unwrap();
    for j in -12..=6 {
        acc = acc.add(&band_project(&g, DyadicBand::new(j), &cut).unwrap()).unwrap();
    }
    let lo = 2f64.powi(-13);
    let low = RadialDensity::new(1, move |r| c(cut.phi(r / lo) * (-0.5 * r * r).exp()), vec![0.0, lo, 2.0 * lo], lo / 8.0, false)
        .transform_profile(g.radii(), 1e-10)
        .unwrap();
    assert!(low.max_abs() > 1e-4, "remainder should be visible in n = 1");
    let diff = acc.add(&low).unwrap().add(&g.scale(c(-1.0))).unwrap();
    assert!(diff.max_abs() < 1e-6, "{}", diff.max_abs());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn psi_is_a_partition_everywhere(r in 1e-3f64..1e3) {
        let cut = CutoffProfile::default();
        let s: f64 = (-14..=14).map(|j| cut.psi(j, r)).sum();
        prop_assert!((s - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn cutoff_bounds_and_symmetry(r in 0.0f64..3.0, sharp in 0.05f64..5.0) {
        let cut = tfse_core::freq::build_cutoff(sharp).unwrap();
        let v = cut.phi(r);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!((cut.phi(r) + cut.phi(3.0 - r) - 1.0).abs() <= 1e-15 || !(1.0..=2.0).contains(&r));
    }

    #[test]
    fn lp_norm_is_homogeneous(a in 0.1f64..10.0, p in 1.0f64..8.0) {
        let f = RadialProfile::from_fn(2, uniform_grid(0.0, 8.0, 200), GridKind::Uniform, |r| {
            Complex64::new((-r * r).exp(), r.sin() * (-r).exp())
        }).unwrap();
        let n1 = lp_norm_radial(&f, p).unwrap().value;
        let n2 = lp_norm_radial(&f.scale(Complex64::new(0.0, a)), p).unwrap().value;
        prop_assert!((n2 - a * n1).abs() <= 1e-12 * n2);
    }
}
