mod common;

use common::oracles::*;
use proptest::prelude::*;
use scalediff::stats::*;
use scalediff::Error;

#[test]
fn kolmogorov_tail_reference_values() {
    for (l, want) in [(0.6, KS_TAIL_0_6), (1.0, KS_TAIL_1), (1.8, KS_TAIL_1_8)] {
        let got = kolmogorov_q(l);
        assert!((got - want).abs() < 1e-13, "λ={l}: {got} vs {want}");
    }
    assert_eq!(kolmogorov_q(0.0), 1.0);
    assert!(kolmogorov_q(10.0) < 1e-80);
}

#[test]
fn kolmogorov_tail_is_continuous_across_branches() {
    let (a, b) = (kolmogorov_q(1.18 - 1e-14), kolmogorov_q(1.18 + 1e-14));
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn mean_and_standard_error() {
    let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(m, 2.5);
    assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    assert_eq!(mean_se(&[7.0]), (7.0, 0.0));
    assert!(mean_se(&[]).0.is_nan());
}

#[test]
fn two_sample_ks() {
    let a: Vec<f64> = (0..1000).map(|k| k as f64).collect();
    let same = ks_two_sample(&a, &a).unwrap();
    assert_eq!(same.d, 0.0);
    assert_eq!(same.p_value, 1.0);
    let shifted: Vec<f64> = a.iter().map(|x| x + 200.0).collect();
    let r = ks_two_sample(&a, &shifted).unwrap();
    assert!((r.d - 0.2).abs() < 1e-15);
    assert!(r.p_value < 1e-10);
    assert!(matches!(ks_two_sample(&[], &a), Err(Error::Domain(_))));
}

#[test]
fn one_sample_ks_on_a_uniform_grid() {
    let n = 100;
    let xs: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect();
    let d = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0));
    assert!((d - 0.5 / n as f64).abs() < 1e-15);
}

#[test]
fn fits() {
    let x = [1.0, 2.0, 3.0, 4.0];
    let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
    let (b, a) = linear_fit(&x, &y).unwrap();
    assert!((b + 2.0).abs() < 1e-14 && (a - 3.0).abs() < 1e-14);
    let y: Vec<f64> = x.iter().map(|v: &f64| 5.0 * v.powf(-0.75)).collect();
    assert!((loglog_slope(&x, &y).unwrap() + 0.75).abs() < 1e-13);
    assert!(matches!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]), Err(Error::Domain(_))));
    assert!(matches!(linear_fit(&[1.0], &[0.0]), Err(Error::Domain(_))));
}

proptest! {
    #[test]
    fn tail_is_a_decreasing_probability(l in 0.0f64..4.0, dl in 1e-3f64..0.5) {
        let q = kolmogorov_q(l);
        prop_assert!((0.0..=1.0).contains(&q));
        prop_assert!(kolmogorov_q(l + dl) <= q);
    }
}
