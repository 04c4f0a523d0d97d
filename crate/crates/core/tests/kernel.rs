mod common;

use common::oracles::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scalediff::kernel::*;
use scalediff::quad::QuadSpec;
use scalediff::stats::ks_one_sample;
use scalediff::{Error, NuParam};
use std::f64::consts::PI;

fn p(nu: f64) -> NuParam {
    NuParam::new(nu).unwrap()
}

fn spec() -> QuadSpec {
    QuadSpec::new(1e-12, 1e-11, 50_000)
}

#[test]
fn closed_form_reference_values() {
    let cases = [
        (2.0, 1.0, 0.0, 0.0, PHI_2_1_0_0),
        (1.0, 0.5, 1.0, -1.0, PHI_1_05_1_NEG1),
        (2.0, 1.0, 0.7, 1.2, PHI_2_1_07_12),
        (3.0, 0.2, -0.5, -0.8, PHI_3_02_NEG05_NEG08),
        (0.5, 2.0, 3.0, -2.0, PHI_05_2_3_NEG2),
        (1.0, 0.01, 2.0, 2.0, PHI_1_001_2_2),
    ];
    for (nu, t, x, y, want) in cases {
        let got = phi(&p(nu), t, x, y).unwrap();
        assert!(((got - want) / want).abs() < 1e-11, "nu={nu} t={t} x={x} y={y}: {got} vs {want}");
    }
}

#[test]
fn rejects_nonpositive_time() {
    for t in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(matches!(phi(&p(1.0), t, 0.1, 0.2), Err(Error::Domain(_))), "t={t}");
    }
}

#[test]
fn normalization_and_chapman_kolmogorov_grid() {
    for nu in [0.5, 2.0] {
        let p = p(nu);
        for s in [0.1, 0.5, 2.0] {
            for x in [0.0, 0.8, -1.5] {
                let m = normalization(&p, s, x, &spec()).unwrap();
                assert!((m - 1.0).abs() < 1e-9, "nu={nu} t={s} x={x}: mass {m}");
                let r = chapman_kolmogorov_residual(&p, s, 0.4, x, 0.3, &spec()).unwrap();
                assert!(r < 1e-9, "nu={nu} s={s} x={x}: CK {r:e}");
            }
        }
    }
}

#[test]
fn spectral_representation_matches() {
    let sp = QuadSpec::new(1e-12, 1e-10, 400_000);
    for nu in [0.5, 1.0, 3.0] {
        let p = p(nu);
        for (t, x, y) in [(1.0, 0.3, -0.6), (0.5, 1.1, 1.4), (2.0, 0.0, 0.9)] {
            let a = phi_spectral(&p, t, x, y, &sp).unwrap();
            let b = phi(&p, t, x, y).unwrap();
            assert!((a - b).abs() < 1e-9, "nu={nu} ({t},{x},{y}): {a} vs {b}");
            let im = phi_spectral_complex(&p, t, x, y, &sp).unwrap().im;
            assert!(im.abs() < 1e-9, "imaginary part {im}");
        }
    }
}

#[test]
fn heat_equation_second_order_in_space() {
    let p = p(1.0);
    let r1 = heat_residual(&p, 1.0, 0.5, 0.8, 1e-4, 1e-2).unwrap();
    let r2 = heat_residual(&p, 1.0, 0.5, 0.8, 1e-4, 5e-3).unwrap();
    let order = (r1 / r2).log2();
    assert!((order - 2.0).abs() < 0.2, "order {order} ({r1:e}, {r2:e})");
    assert!(heat_residual(&p, 1.0, 0.5, 0.8, 1e-4, 1e-4).unwrap() < 1e-6);
    assert!(matches!(heat_residual(&p, 1.0, 0.5, 0.8, 1.0, 1e-3), Err(Error::Config(_))));
}

#[test]
fn gaussian_reduction_as_nu_vanishes() {
    let p = p(1e-8);
    let mut worst = 0.0f64;
    for t in [0.1, 1.0] {
        for i in -10..=10 {
            for j in -10..=10 {
                let (x, y) = (0.5 * i as f64 + 0.013, 0.5 * j as f64 - 0.007);
                let g = (-(x - y) * (x - y) / (2.0 * t)).exp() / (2.0 * PI * t).sqrt();
                worst = worst.max((phi(&p, t, x, y).unwrap() - g).abs());
            }
        }
    }
    assert!(worst < 1e-6, "sup gap {worst:e}");
}

#[test]
fn small_time_form_is_leading_order() {
    let p = p(2.0);
    for (x, y) in [(1.0, 1.01), (0.6, 0.59), (-1.5, -1.52)] {
        let a = phi(&p, 1e-4, x, y).unwrap();
        let b = phi_small_t(&p, 1e-4, x, y).unwrap();
        assert!((a / b - 1.0).abs() < 1e-2, "({x},{y}): {a} vs {b}");
    }
    assert_eq!(phi_small_t(&p, 1e-4, 1.0, -1.0).unwrap(), 0.0);
}

#[test]
fn r_coordinate_round_trip() {
    let p = p(1.5);
    for x in [-3.0, -0.2, 0.0, 0.7, 12.0] {
        assert!((from_r(&p, to_r(&p, x)) - x).abs() < 1e-14 * (1.0 + x.abs()));
    }
}

#[test]
fn kernel_table_is_a_cdf_and_samples_follow_it() {
    let p = p(2.0);
    let tbl = build_kernel_table(&p, 1.0, 0.4, 512).unwrap();
    assert!((tbl.mass() - 1.0).abs() < 1e-6);
    assert!(tbl.cdf.windows(2).all(|w| w[1] >= w[0]));
    assert!(tbl.grid.windows(2).all(|w| w[1] > w[0]));
    for u in [0.01, 0.3, 0.5, 0.9, 0.999] {
        assert!((tbl.cdf_at(tbl.quantile(u)) / tbl.mass() - u).abs() < 1e-9);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let xs: Vec<f64> = (0..20_000).map(|_| sample_from_table(&tbl, &mut rng)).collect();
    let d = ks_one_sample(&xs, |y| tbl.cdf_at(y));
    // 1.63/√n is the 1% critical value
    assert!(d < 1.63 / (xs.len() as f64).sqrt(), "KS {d}");
}

#[test]
fn kernel_table_rejects_low_resolution() {
    assert!(matches!(build_kernel_table(&p(1.0), 1.0, 0.0, 10), Err(Error::Config(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric_and_reflection_invariant(nu in 0.2f64..4.0, t in 0.05f64..5.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let p = p(nu);
        let a = phi(&p, t, x, y).unwrap();
        let b = phi(&p, t, y, x).unwrap();
        let c = phi(&p, t, -x, -y).unwrap();
        prop_assert!(a >= 0.0 && a.is_finite());
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        prop_assert!((a - c).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn scale_invariance(nu in 0.2f64..4.0, n in 1.5f64..500.0, t in 0.1f64..3.0, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let p = p(nu);
        let s = n.powf(p.char_exp);
        let a = s * phi(&p, n * t, s * x, s * y).unwrap();
        let b = phi(&p, t, x, y).unwrap();
        prop_assert!((a - b).abs() <= 1e-11 * (1.0 + b), "{} vs {}", a, b);
    }

    #[test]
    fn origin_value(nu in 0.2f64..4.0, t in 0.01f64..10.0) {
        let p = p(nu);
        let v = phi(&p, t, 0.0, 0.0).unwrap();
        prop_assert!((v * p.n_nu * t.powf(p.char_exp) - 1.0).abs() < 1e-13);
    }
}
