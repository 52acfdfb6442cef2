use num_complex::Complex64;
use proptest::prelude::*;
use tfse_core::besov::{
    besov_norm, besov_norm_spectrum, besov_norm_with_cutoff, combine, lq_monotonicity_check, write_besov_csv, BesovSpec, Spectrum,
    BESOV_CSV_HEADER,
};
use tfse_core::freq::{build_cutoff, lp_norm_radial, uniform_grid, CutoffProfile, GridKind, RadialProfile};
use tfse_core::quad::panel_rule;

fn gaussian_profile(n: u32) -> RadialProfile {
    RadialProfile::from_fn(n, uniform_grid(0.0, 12.0, 481), GridKind::Uniform, |r| {
        Complex64::new((-0.5 * r * r).exp(), 0.0)
    })
    .unwrap()
}

/// `(σ_{n−1} ∫ |f̂|² Σ_j ψ_j² ρ^{n−1} dρ)^{1/2}`: the `Ḃ^0_{2,2}` norm computed on the frequency side.
fn frequency_side_b022(n: u32, cut: CutoffProfile, g: impl Fn(f64) -> f64, hi: f64, j_min: i32, j_max: i32) -> f64 {
    let area = tfse_core::freq::sphere_area(n);
    let mut total = 0.0;
    for (r, w) in panel_rule(0.0, hi, 1e-3, 16) {
        let s: f64 = (j_min..=j_max).map(|j| cut.psi(j, r).powi(2)).sum();
        total += w * g(r).powi(2) * s * r.powi(n as i32 - 1);
    }
    (area * total).sqrt()
}

#[test]
fn gaussian_b022_against_l2() {
    let f = gaussian_profile(1);
    let spec = BesovSpec::with_range(0.0, 2.0, 2.0, -10, 10).unwrap();
    let l2 = lp_norm_radial(&f, 2.0).unwrap().value;
    // Σ ψ_j² dips to 1/2 between band centres, so the norm is the frequency-side value
    let b = besov_norm(&f, &spec).unwrap();
    let want = frequency_side_b022(1, CutoffProfile::default(), |r| (-0.5 * r * r).exp(), 10.0, -10, 10);
    assert!((b.value / want - 1.0).abs() < 1e-5, "{} vs {want}", b.value);
    assert_eq!(b.blocks.len(), 21);
    assert!(b.warning.is_some(), "range [-10, 10] misses the low frequencies: leakage {}", b.leakage);
    // which for the default family is 0.904 ‖f‖₂; a sharper family is within 2%
    assert!((b.value / l2 - 0.904).abs() < 1e-3, "{}", b.value / l2);
    let sharp = build_cutoff(8.0).unwrap();
    let b = besov_norm_with_cutoff(&f, &spec, &sharp).unwrap();
    assert!((b.value / l2 - 1.0).abs() < 0.02, "{} vs {l2}", b.value);
}

#[test]
fn band_limited_input_has_three_blocks() {
    let cut = CutoffProfile::default();
    for n in [1u32, 3] {
        let f = Spectrum::band_bump(n, 0, cut).unwrap();
        let spec = BesovSpec::with_range(0.0, 2.0, 2.0, -4, 4).unwrap();
        let b = besov_norm_spectrum(&f, &spec, &cut).unwrap();
        for blk in &b.blocks {
            assert_eq!(blk.block_lp > 0.0, (-1..=1).contains(&blk.j), "n={n} j={}", blk.j);
        }
        let want = frequency_side_b022(n, cut, |r| cut.psi0(r), 2.0, -4, 4);
        assert!((b.value / want - 1.0).abs() < 1e-6, "n={n}: {} vs {want}", b.value);
        assert!(b.leakage < 1e-12 && b.warning.is_none());
        // the middle block is the largest and close to the full norm
        let l2 = frequency_side_b022(n, cut, |r| cut.psi0(r), 2.0, 0, 0);
        assert!((b.blocks[4].block_lp / l2 - 1.0).abs() < 1e-6);
    }
}

#[test]
fn homogeneity_in_the_function() {
    let f = RadialProfile::from_fn(2, uniform_grid(0.0, 8.0, 161), GridKind::Uniform, |r| {
        Complex64::new((-0.5 * r * r).exp(), 0.0)
    })
    .unwrap();
    let c = Complex64::new(2.0, -3.0);
    let spec = BesovSpec::with_range(0.5, 1.5, 1.0, -3, 2).unwrap();
    let a = besov_norm(&f, &spec).unwrap().value;
    let b = besov_norm(&f.scale(c), &spec).unwrap().value;
    assert!((b / (c.norm() * a) - 1.0).abs() < 1e-12, "{b} vs {}", c.norm() * a);
}

#[test]
fn perturbing_one_band_changes_only_its_neighbours() {
    let cut = CutoffProfile::default();
    let base = Spectrum::gaussian(1, 1.0).unwrap();
    let g = base.clone();
    let bumped = Spectrum::new(1, move |r| g.value(r) + 0.1 * cut.psi(2, r), (0.0, 9.0), 9.0, 0.1, 1.0).unwrap();
    let a = base.block_norms(-3, 4, &[1.0, 2.0], &cut).unwrap();
    let b = bumped.block_norms(-3, 4, &[1.0, 2.0], &cut).unwrap();
    for (x, y) in a.iter().zip(&b) {
        if (1..=3).contains(&x.j) {
            assert!(x.lp != y.lp, "j={} should change", x.j);
        } else {
            assert!((x.lp[0] - y.lp[0]).abs() <= 1e-9 * x.lp[0].max(1e-300), "j={}: {:?} vs {:?}", x.j, x.lp, y.lp);
        }
    }
}

#[test]
fn dilation_shifts_the_band_index() {
    // P_j[f(2·)](x) = (P_{j−1} f)(2x), so ‖P_j f(2·)‖_p = 2^{−n/p} ‖P_{j−1} f‖_p
    let cut = CutoffProfile::default();
    let n = 1;
    let f = Spectrum::gaussian(n, 1.0).unwrap();
    let f2 = Spectrum::gaussian(n, 0.5).unwrap();
    let ps = [1.0, 2.0, f64::INFINITY];
    let a = f.block_norms(-4, 2, &ps, &cut).unwrap();
    let b = f2.block_norms(-3, 3, &ps, &cut).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(y.j, x.j + 1);
        for (k, &p) in ps.iter().enumerate() {
            let want = x.lp[k] * 2f64.powf(-(n as f64) / p);
            assert!((y.lp[k] / want - 1.0).abs() < 1e-6, "j={} p={p}: {} vs {want}", y.j, y.lp[k]);
        }
    }
}

#[test]
fn monotonicity_check_on_a_profile() {
    let f = gaussian_profile(1);
    let r = lq_monotonicity_check(&f, 0.5, 2.0, 1.0, 2.0, -6, 4).unwrap();
    assert!(r.pass && r.norm_q2 < r.norm_q1);
    let r = lq_monotonicity_check(&f, 0.5, 2.0, 2.0, 2.0, -6, 4).unwrap();
    assert_eq!(r.norm_q1, r.norm_q2);
    let r = lq_monotonicity_check(&f, 0.0, 1.0, 1.0, f64::INFINITY, -6, 4).unwrap();
    assert!(r.pass);
    assert!(lq_monotonicity_check(&f, 0.0, 1.0, 3.0, 2.0, -6, 4).is_err());
}

#[test]
fn band_table_csv() {
    let (_, rows) = combine(&[(-1, 0.5), (0, 1.0)], 1.0, 2.0);
    let mut buf = Vec::new();
    write_besov_csv(&mut buf, &rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(BESOV_CSV_HEADER));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first, vec![-1.0, 0.5, 0.5, 0.25]);
}

proptest! {
    #[test]
    fn lq_nesting(blocks in proptest::collection::vec(0.0f64..10.0, 1..12), s in -1.0f64..1.0, q1 in 1.0f64..6.0, dq in 0.0f64..6.0) {
        let pairs: Vec<(i32, f64)> = blocks.iter().enumerate().map(|(i, &b)| (i as i32 - 5, b)).collect();
        let (a, _) = combine(&pairs, s, q1);
        let (b, _) = combine(&pairs, s, q1 + dq);
        let (c, _) = combine(&pairs, s, f64::INFINITY);
        prop_assert!(b <= a * (1.0 + 1e-10));
        prop_assert!(c <= b * (1.0 + 1e-10));
    }
}
