use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use scalediff::martingale::*;
use scalediff::processes::{sample_limit_paths, LimitOptions, RateModel, SdeModel};
use scalediff::{Error, NuParam};

fn p(nu: f64) -> NuParam {
    NuParam::new(nu).unwrap()
}

fn random_walk(n_paths: usize, steps: usize, drift: f64, seed: u64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let times: Vec<f64> = (0..=steps).map(|k| k as f64).collect();
    let values = (0..n_paths)
        .map(|_| {
            let mut x = 0.0;
            let mut v = vec![0.0];
            for _ in 0..steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                x += drift + z;
                v.push(x);
            }
            v
        })
        .collect();
    (times, values)
}

#[test]
fn drift_test_accepts_a_martingale_and_flags_drift() {
    let (t, v) = random_walk(2000, 5, 0.0, 1);
    let r = drift_test(&t, &v, 4.0).unwrap();
    assert!(r.passed(), "max |t| {}", r.max_abs_t);
    assert_eq!(r.rows.len(), 6);
    let (t, v) = random_walk(2000, 5, 0.3, 2);
    let r = drift_test(&t, &v, 4.0).unwrap();
    assert!(!r.passed());
    assert_eq!(r.flagged, vec![1, 2, 3, 4, 5]);
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("t,mean,se,tstat\n0,0,0,NaN\n"));
}

#[test]
fn drift_test_guards() {
    let (t, v) = random_walk(10, 2, 0.0, 1);
    assert!(matches!(drift_test(&t, &v, 4.0), Err(Error::Config(_))));
    let flat = vec![vec![1.0, 1.0]; MIN_DRIFT_PATHS];
    let r = drift_test(&[0.0, 1.0], &flat, 4.0).unwrap();
    assert_eq!(r.degenerate, vec![1]);
    assert!(!r.passed());
}

#[test]
fn limit_coordinate_is_a_martingale() {
    let p = p(2.0);
    let ens = sample_limit_paths(&p, 0.2, &[0.0, 0.25, 0.5, 1.0], 4000, 8, LimitOptions::default()).unwrap();
    let r = martingale_drift_test(&ens, |x| Ok(y_limit(&p, x)), 4.0).unwrap();
    assert!(r.passed(), "max |t| {}", r.max_abs_t);
    // |x| is not: its mean grows
    let r = martingale_drift_test(&ens, |x| Ok(x.abs()), 4.0).unwrap();
    assert!(!r.passed());
    assert!(matches!(channel_drift_test(&ens, "nope", 4.0), Err(Error::Config(_))));
}

#[test]
fn hitting_time_of_the_unit_level() {
    let p = p(2.0);
    let opts = HittingOptions { dt: 1e-4, ..HittingOptions::default() };
    let h = hitting_time_mean(&p, 1.0, 2000, 3, opts).unwrap();
    let exact = hitting_time_exact(&p, 1.0);
    assert_eq!(exact, 0.5);
    assert!((h.mean - exact).abs() < 3.0 * h.se + 0.03 * exact, "{h:?}");
    assert!(h.coarse_mean >= h.fine_mean);
    assert_eq!(h.unfinished, 0);
    assert!(matches!(hitting_time_mean(&p, -1.0, 10, 1, opts), Err(Error::Domain(_))));
}

#[test]
fn continuum_map_identities() {
    let m = ContinuumMap::new(SdeModel::default_model(p(2.0)), 100.0).unwrap();
    for x in [-3.0, -0.4, -0.01, 0.0, 0.02, 0.5, 2.5] {
        let y = m.y_n(x).unwrap();
        assert!((m.w_n(y).unwrap() - x).abs() < 1e-10 * (1.0 + x.abs()), "x={x}");
        assert!((m.w_n_from(y, x + 0.1) - x).abs() < 1e-10 * (1.0 + x.abs()), "x={x}");
        // Y_N' = (ν+1)/D_N and Q_N(Y_N(x)) = D_N Y_N'^2
        assert!((m.dy_dx(x) * m.d_n(x) - 3.0).abs() < 1e-12);
        let q = m.q_n_at_x(x);
        assert!((q - 9.0 / m.d_n(x)).abs() < 1e-10 * q);
    }
    assert!(m.check_monotone(&[-2.0, -1.0, 0.0, 0.3, 4.0]).is_ok());
    assert!(matches!(ContinuumMap::new(SdeModel::default_model(p(2.0)), 0.5), Err(Error::Config(_))));
}

#[test]
fn continuum_map_approaches_the_limit() {
    // gap decays like the regularization scale N^{-ν/(ν+2)}
    for nu in [1.0, 2.0] {
        let p = p(nu);
        let ns = [10.0, 100.0, 1e3, 1e4, 1e5];
        let gaps: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let m = ContinuumMap::new(SdeModel::default_model(p), n).unwrap();
                (m.y_n(1.3).unwrap() - y_limit(&p, 1.3)).abs()
            })
            .collect();
        let slope = scalediff::stats::loglog_slope(&ns, &gaps).unwrap();
        assert!((slope + nu / (nu + 2.0)).abs() < 0.02, "nu={nu}: slope {slope}");
    }
}

#[test]
fn discrete_map_is_harmonic_and_asymptotic() {
    let m = DiscreteMap::new(RateModel::default_model(2.0), 1000.0, 2000).unwrap();
    let r = &m.rates;
    for n in [-50, -3, -1, 0, 1, 2, 17, 1999, 2500] {
        let lr = r.rate_plus(n) * (m.y_hat(n + 1) - m.y_hat(n)) + r.rate_minus(n) * (m.y_hat(n - 1) - m.y_hat(n));
        assert!(lr.abs() < 1e-9 * m.y_hat(n).abs().max(1.0), "n={n}: {lr:e}");
    }
    let ratio = m.y_hat(1500) / y_limit(&m.p, 1500.0);
    assert!((ratio - 1.0).abs() < 1e-3, "{ratio}");
    assert!(m.q_hat(0) > 0.0 && m.a_hat(5).is_finite());
}

#[test]
fn limit_maps_round_trip() {
    let p = p(1.5);
    for x in [-2.0, -0.3, 0.0, 0.9, 7.0] {
        assert!((w_limit(&p, y_limit(&p, x)) - x).abs() < 1e-13 * (1.0 + x.abs()));
    }
    assert_eq!(q_limit(&p, 0.0), 0.0);
    assert!((sub_exponent(&p) - 3.5 / 2.5).abs() < 1e-15);
}

#[test]
fn continuum_envelope_slopes() {
    let ns = [10.0, 100.0, 1000.0, 1e4];
    let fits = continuum_envelopes(&SdeModel::default_model(p(2.0)), &ns, 10.0).unwrap();
    assert_eq!(fits.len(), 7);
    for f in &fits {
        assert!(f.passed(0.1, 3.0), "{}: slope {} expected {:?} ratio {}", f.name, f.slope, f.expected_slope, f.constant_ratio());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn discrete_inverse(nu in 0.3f64..3.5, n in -3000i64..3000) {
        let m = DiscreteMap::new(RateModel::default_model(nu), 100.0, 1000).unwrap();
        prop_assert_eq!(m.w_hat(m.y_hat(n)), n);
    }

    #[test]
    fn continuum_inverse(nu in 0.3f64..3.5, n in 1.0f64..1e5, x in -5.0f64..5.0) {
        let m = ContinuumMap::new(SdeModel::default_model(NuParam::new(nu).unwrap()), n).unwrap();
        let y = m.y_n(x).unwrap();
        prop_assert!((m.w_n(y).unwrap() - x).abs() < 1e-9 * (1.0 + x.abs()));
    }
}
