mod common;

use common::oracles::*;
use proptest::prelude::*;
use scalediff::specfun::*;
use scalediff::Error;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn gamma_classical_values() {
    assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-14);
    assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-14);
    assert!(rel(gamma(0.25).unwrap(), GAMMA_QUARTER) < 1e-13);
    assert!(rel(gamma(30.0).unwrap(), GAMMA_THIRTY) < 1e-13);
    assert!(rel(gamma(0.05).unwrap(), GAMMA_0_05) < 1e-13);
    assert!(rel(gamma(-2.5).unwrap(), GAMMA_NEG_2_5) < 1e-13);
}

#[test]
fn gamma_errors() {
    assert!(matches!(gamma(0.0), Err(Error::Domain(_))));
    assert!(matches!(gamma(-3.0), Err(Error::Domain(_))));
    assert!(matches!(gamma(200.0), Err(Error::Range(_))));
}

#[test]
fn gamma_recurrence_on_grid() {
    for i in 1..600 {
        let x = 0.05 + 0.05 * i as f64;
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        assert!(rel(lhs, rhs) < 2e-14, "x = {x}");
    }
}

#[test]
fn bessel_j_half_orders() {
    let z = PI / 2.0;
    assert!((bessel_j(0.5, z).unwrap() - 2.0 / PI).abs() < 1e-12);
    assert!((bessel_j(-0.5, PI).unwrap() + 2f64.sqrt() / PI).abs() < 1e-12);
    for i in 1..400 {
        let z = 0.1 * i as f64 + 0.013;
        let pref = (2.0 / (PI * z)).sqrt();
        assert!((bessel_j(0.5, z).unwrap() - pref * z.sin()).abs() < 1e-12, "z = {z}");
        assert!((bessel_j(-0.5, z).unwrap() - pref * z.cos()).abs() < 1e-12, "z = {z}");
    }
}

#[test]
fn bessel_j_against_oracle() {
    assert!(rel(bessel_j(0.75, 7.3).unwrap(), J_3_4_AT_7_3) < 1e-10);
    assert!(rel(bessel_j(-1.0 / 3.0, 2.0).unwrap(), J_NEG_1_3_AT_2) < 1e-10);
    assert!(rel(bessel_j(0.2, 20.0).unwrap(), J_0_2_AT_20) < 1e-10);
    assert!(rel(bessel_j(0.75, 1e3).unwrap(), J_3_4_AT_1E3) < 1e-10);
    assert!(rel(bessel_j(-0.75, 1e4).unwrap(), J_NEG_3_4_AT_1E4) < 1e-10);
}

#[test]
fn bessel_j_small_argument_form() {
    for &a in &[-0.9, -0.5, 0.3, 0.75] {
        let z: f64 = 1e-4;
        let lead = (0.5 * z).powf(a) / gamma(1.0 + a).unwrap();
        let v = bessel_j(a, z).unwrap();
        assert!(((v - lead) / lead).abs() < 1e-6);
    }
}

#[test]
fn bessel_i_scaled_against_closed_forms_and_oracle() {
    let v = bessel_i_scaled(0.5, 2.0).unwrap();
    // e^{-x} I_{1/2}(x) = (1 - e^{-2x}) / sqrt(2 pi x)
    assert!((v - (1.0 - (-4f64).exp()) / (2.0 * PI * 2.0).sqrt()).abs() < 1e-12);
    assert!((v - 0.276_928_045_435_355).abs() < 1e-10);
    assert_eq!(bessel_i_scaled(0.3, 0.0).unwrap(), 0.0);
    assert!(rel(bessel_i_scaled(-0.75, 50.0).unwrap(), I_SCALED_NEG_3_4_AT_50) < 1e-10);
    assert!(rel(bessel_i_scaled(0.6, 3.0).unwrap(), I_SCALED_0_6_AT_3) < 1e-10);
    assert!(rel(bessel_i_scaled(-0.9, 0.01).unwrap(), I_SCALED_NEG_0_9_AT_0_01) < 1e-10);
    assert!(rel(bessel_i_scaled(0.75, 1e6).unwrap(), I_SCALED_0_75_AT_1E6) < 1e-10);
    let big = bessel_i_scaled(0.3, 1e8).unwrap();
    assert!(rel(big, 1.0 / (2.0 * PI * 1e8).sqrt()) < 1e-8);
}

#[test]
fn bessel_i_half_orders() {
    for i in 1..400 {
        let z = 0.1 * i as f64 + 0.007;
        let pref = (2.0 / (PI * z)).sqrt();
        let sinh = 0.5 * (1.0 - (-2.0 * z).exp());
        let cosh = 0.5 * (1.0 + (-2.0 * z).exp());
        assert!(rel(bessel_i_scaled(0.5, z).unwrap(), pref * sinh) < 1e-12, "z = {z}");
        assert!(rel(bessel_i_scaled(-0.5, z).unwrap(), pref * cosh) < 1e-12, "z = {z}");
    }
}

#[test]
fn crossover_continuity() {
    let acc = SpecFunAccuracy::default();
    let z = acc.series_switch;
    for &a in &[-0.95, -0.75, -0.6, -0.5, -0.25, 0.0, 0.2, 0.5, 0.6, 0.75, 0.9] {
        let s = bessel_i_scaled_series(a, z, &acc).unwrap();
        let t = bessel_i_scaled_asymptotic(a, z, &acc).unwrap();
        assert!(((s - t) / s).abs() <= 10.0 * acc.rel_tol, "I order {a}: {s} vs {t}");
        let s = bessel_j_series(a, z, &acc).unwrap();
        let t = bessel_j_asymptotic(a, z, &acc).unwrap();
        assert!(((s - t) / s).abs() <= 10.0 * acc.rel_tol, "J order {a}: {s} vs {t}");
    }
}

#[test]
fn domain_errors() {
    assert!(matches!(bessel_j(0.5, -1.0), Err(Error::Domain(_))));
    assert!(matches!(bessel_j(1.5, 1.0), Err(Error::Domain(_))));
    assert!(matches!(bessel_i_scaled(-1.0, 1.0), Err(Error::Domain(_))));
}

#[test]
fn double_double_elementary_functions() {
    let x = DoubleDouble::new(0.7);
    let e = x.exp();
    let back = e.ln();
    assert!((back - x).abs().hi < 1e-30);
    let (s, c) = DoubleDouble::new(123.456).sin_cos();
    let one = s * s + c * c;
    assert!((one - DoubleDouble::ONE).abs().hi < 1e-30);
    assert!((s.to_f64() - 123.456f64.sin()).abs() < 1e-13);
    let r = DoubleDouble::new(2.0).sqrt();
    assert!((r * r - DoubleDouble::new(2.0)).abs().hi < 1e-30);
}

proptest! {
    #[test]
    fn i_negative_order_dominates(a in 0.01f64..0.99, z in 1e-3f64..200.0) {
        let lo = bessel_i_scaled(a, z).unwrap();
        let hi = bessel_i_scaled(-a, z).unwrap();
        prop_assert!(hi >= lo);
    }

    #[test]
    fn i_scaled_finite_positive(a in -0.99f64..0.99, z in 1e-6f64..1e7) {
        let v = bessel_i_scaled(a, z).unwrap();
        prop_assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn j_bounded(a in -0.99f64..0.99, z in 1.0f64..1e4) {
        let v = bessel_j(a, z).unwrap();
        prop_assert!(v.is_finite() && v.abs() <= 1.0);
    }
}
