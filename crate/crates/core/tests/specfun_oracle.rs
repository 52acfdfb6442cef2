use num_complex::Complex64;
use proptest::prelude::*;
use tfse_core::specfun::{
    bessel_j, gamma_real, ml_asymptotic_optimal, ml_eval, ml_series, omega_n, recip_gamma, EvalMethod, MLOrder,
};

struct MlRow {
    alpha: f64,
    z: Complex64,
    e: Complex64,
}

fn ml_rows() -> Vec<MlRow> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/ml_oracle.csv");
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            let f = |i: usize| r[i].parse::<f64>().unwrap();
            MlRow { alpha: f(0), z: Complex64::new(f(1), f(2)), e: Complex64::new(f(3), f(4)) }
        })
        .collect()
}

#[test]
fn ml_eval_matches_extended_precision_oracle() {
    let rows = ml_rows();
    assert!(rows.len() > 100);
    let mut worst: f64 = 0.0;
    for row in &rows {
        let (v, d) = ml_eval(MLOrder::new(row.alpha).unwrap(), row.z).unwrap();
        let err = (v - row.e).norm();
        let rel = err / row.e.norm();
        worst = worst.max(rel);
        assert!(rel <= 1e-10, "alpha={} z={} got {v} want {} rel {rel:e}", row.alpha, row.z, row.e);
        assert!(err <= d.est_error.max(4.0 * f64::EPSILON * row.e.norm()) * 10.0,
            "est_error {:e} does not cover {err:e} at alpha={} z={}", d.est_error, row.alpha, row.z);
    }
    eprintln!("worst relative error against oracle: {worst:e}");
}

#[test]
fn both_branches_match_oracle_on_overlap_annulus() {
    for row in ml_rows() {
        let order = MLOrder::new(row.alpha).unwrap();
        let w = row.z.norm().powf(1.0 / row.alpha);
        if !(26.0..=40.0).contains(&w) || row.alpha == 1.0 {
            continue;
        }
        let (s, _) = ml_series(order, row.z, 1e-17).unwrap();
        let (a, d) = ml_asymptotic_optimal(order, row.z).unwrap();
        let scale = row.e.norm();
        assert!((s - row.e).norm() <= 1e-8 * scale, "series off at {} {}", row.alpha, row.z);
        assert!((a - row.e).norm() <= 1e-8 * scale, "asymptotic off at {} {}: {a} vs {}", row.alpha, row.z, row.e);
        assert!((s - a).norm() <= 1e-6 * scale);
        assert_eq!(d.method, EvalMethod::Asymptotic);
    }
}

#[test]
fn half_order_minus_30i_spot_value() {
    let (v, _) = ml_eval(MLOrder::new(0.5).unwrap(), Complex64::new(0.0, -30.0)).unwrap();
    assert!((v.im + 0.018_816_784_868_660_728).abs() < 1e-15);
    assert!(v.re.abs() < 1e-15);
}

#[test]
fn bessel_matches_oracle() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/bessel_oracle.csv");
    let mut rdr = csv::Reader::from_path(path).unwrap();
    for r in rdr.records() {
        let r = r.unwrap();
        let nu: f64 = r[0].parse().unwrap();
        let x: f64 = r[1].parse().unwrap();
        let want: f64 = r[2].parse().unwrap();
        let (got, d) = bessel_j(nu, x).unwrap();
        // measure against the oscillation envelope so zeros of J do not inflate the error
        let scale = if x > 1.0 { (2.0 / (std::f64::consts::PI * x)).sqrt() } else { want.abs() };
        let err = (got - want).abs();
        assert!(err <= 1e-10 * scale, "J_{nu}({x}) = {got}, want {want}, method {:?}", d.method);
        assert!(err <= d.est_error.max(1e-16 * scale) * 10.0, "J_{nu}({x}): est {:e} vs err {err:e}", d.est_error);
    }
}

#[test]
fn bessel_spot_values() {
    let (v, d) = bessel_j(-0.5, std::f64::consts::PI).unwrap();
    assert!((v + 0.450_158_158_078_553_1).abs() < 1e-15);
    assert_eq!(d.method, EvalMethod::ClosedForm);
    assert_eq!(bessel_j(0.0, 0.0).unwrap().0, 1.0);
    let (v, _) = bessel_j(0.5, std::f64::consts::FRAC_PI_2).unwrap();
    assert!((v - 2.0 / std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn bessel_recurrence() {
    let mut x = 0.1;
    while x <= 50.0 {
        for nu in [0.5, 1.0, 1.5] {
            let a = bessel_j(nu - 1.0, x).unwrap().0;
            let b = bessel_j(nu + 1.0, x).unwrap().0;
            let c = bessel_j(nu, x).unwrap().0;
            let lhs = a + b;
            let rhs = 2.0 * nu / x * c;
            let scale = a.abs().max(b.abs()).max(1e-300);
            assert!((lhs - rhs).abs() <= 1e-8 * scale, "nu={nu} x={x}: {lhs} vs {rhs}");
        }
        x *= 1.13;
    }
}

#[test]
fn omega_continuity_at_origin() {
    for n in 1..=5u32 {
        let o0 = omega_n(n, 0.0);
        let mut prev = f64::INFINITY;
        for k in 1..=8 {
            let d = (omega_n(n, 10f64.powi(-k)) - o0).abs();
            assert!(d <= prev, "n={n} k={k}");
            prev = d;
        }
        assert!(prev < 1e-15);
    }
}

#[test]
fn first_term_asymptotics_on_imaginary_axis() {
    for alpha in [0.3, 0.5, 0.8] {
        let order = MLOrder::new(alpha).unwrap();
        let c1 = recip_gamma(1.0 - alpha);
        let c2 = recip_gamma(1.0 - 2.0 * alpha);
        let bound_coef = if c2 == 0.0 { 10.0 } else { 10.0 * c2.abs() };
        let mut s: f64 = 1e3;
        while s <= 1e8 {
            let (e, _) = ml_eval(order, Complex64::new(0.0, -s)).unwrap();
            let dev = (e * s + Complex64::new(0.0, c1)).norm();
            assert!(dev <= bound_coef / s, "alpha={alpha} s={s}: {dev:e}");
            s *= 3.7;
        }
    }
}

#[test]
fn gamma_spec_examples() {
    assert_eq!(gamma_real(1.0).unwrap(), 1.0);
    assert_eq!(gamma_real(5.0).unwrap(), 24.0);
    assert!((gamma_real(0.5).unwrap() - 1.772_453_850_905_516).abs() < 1e-15);
    assert_eq!(recip_gamma(0.0), 0.0);
    assert_eq!(recip_gamma(-1.0), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classical_limit(r in 0.0f64..30.0, th in -std::f64::consts::PI..std::f64::consts::PI) {
        let z = Complex64::from_polar(r, th);
        let (v, _) = ml_eval(MLOrder::new(1.0).unwrap(), z).unwrap();
        prop_assert!((v - z.exp()).norm() <= 1e-12 * z.exp().norm());
    }

    #[test]
    fn conjugation_symmetry(alpha in 0.1f64..1.0, r in 0.0f64..200.0, th in -3.1f64..3.1) {
        let order = MLOrder::new(alpha).unwrap();
        let z = Complex64::from_polar(r, th);
        let a = ml_eval(order, z).unwrap().0;
        let b = ml_eval(order, z.conj()).unwrap().0;
        // E_α overflows f64 quickly near the positive real axis
        prop_assume!(a.re.is_finite() && a.im.is_finite());
        prop_assert!((a - b.conj()).norm() <= 1e-13 * a.norm().max(1e-300));
    }

    #[test]
    fn modulus_decays_on_imaginary_axis(alpha in 0.2f64..0.95, s in 1.0f64..1e6) {
        // |E_α(−is)| ≤ 1 along the negative imaginary axis for 0 < α < 1
        let (v, _) = ml_eval(MLOrder::new(alpha).unwrap(), Complex64::new(0.0, -s)).unwrap();
        prop_assert!(v.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..150.0) {
        let g1 = gamma_real(x + 1.0).unwrap();
        let g0 = gamma_real(x).unwrap();
        prop_assert!((g1 - x * g0).abs() <= 1e-12 * g1.abs());
    }
}
