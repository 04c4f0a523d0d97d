//! Martingale coordinates and the diagnostics built on them: drift tests,
//! first-passage means and the N-dependence of the coordinate maps.

pub mod maps;

pub use maps::{q_limit, sub_exponent, w_limit, y_limit, ContinuumMap, CoordinateMap, DiscreteMap};

use crate::eigen::NuParam;
use crate::error::{Error, Result};
use crate::processes::besq::{besq_coordinate, besq_dimension, besq_step};
use crate::processes::{PathEnsemble, RateModel, SdeModel};
use crate::rng::stream;
use crate::stats::{linear_fit, mean_se};
use rayon::prelude::*;
use std::io::Write;

/// Minimum ensemble size for a drift test.
pub const MIN_DRIFT_PATHS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftRow {
    pub t: f64,
    pub mean: f64,
    pub se: f64,
    /// mean/se; NaN when the variance is degenerate.
    pub tstat: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriftReport {
    pub rows: Vec<DriftRow>,
    pub max_abs_t: f64,
    /// Grid indices with |t| > `threshold`.
    pub flagged: Vec<usize>,
    /// Grid indices (t > 0) with zero sample variance.
    pub degenerate: Vec<usize>,
    pub threshold: f64,
}

impl DriftReport {
    pub fn passed(&self) -> bool {
        self.flagged.is_empty() && self.degenerate.is_empty()
    }

    /// CSV with columns t, mean, se, tstat.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,mean,se,tstat")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.t, r.mean, r.se, r.tstat)?;
        }
        Ok(())
    }
}

/// Tests E[M_t − M_0] = 0 at every grid time for per-path values
/// `values[i][k]` = M_{t_k} on path i.
pub fn drift_test(times: &[f64], values: &[Vec<f64>], threshold: f64) -> Result<DriftReport> {
    if values.len() < MIN_DRIFT_PATHS {
        return Err(Error::Config(format!(
            "drift test needs at least {MIN_DRIFT_PATHS} paths, got {}",
            values.len()
        )));
    }
    let rows: Vec<DriftRow> = (0..times.len())
        .into_par_iter()
        .map(|k| {
            let inc: Vec<f64> = values.iter().map(|v| v[k] - v[0]).collect();
            let (mean, se) = mean_se(&inc);
            let tstat = if se > 0.0 { mean / se } else { f64::NAN };
            DriftRow { t: times[k], mean, se, tstat }
        })
        .collect();
    let mut flagged = Vec::new();
    let mut degenerate = Vec::new();
    let mut max_abs_t = 0.0f64;
    for (k, r) in rows.iter().enumerate().skip(1) {
        if r.tstat.is_nan() {
            degenerate.push(k);
        } else {
            max_abs_t = max_abs_t.max(r.tstat.abs());
            if r.tstat.abs() > threshold {
                flagged.push(k);
            }
        }
    }
    Ok(DriftReport { rows, max_abs_t, flagged, degenerate, threshold })
}

/// Drift test of m(X_t) for a coordinate map m applied to every position.
pub fn martingale_drift_test(
    ens: &PathEnsemble,
    map: impl Fn(f64) -> Result<f64> + Sync,
    threshold: f64,
) -> Result<DriftReport> {
    let values = ens
        .paths
        .par_iter()
        .map(|p| p.iter().map(|&x| map(x)).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    drift_test(&ens.times, &values, threshold)
}

/// Drift test of a recorded aux channel such as `compensated`.
pub fn channel_drift_test(ens: &PathEnsemble, channel: &str, threshold: f64) -> Result<DriftReport> {
    let v = ens
        .aux_channel(channel)
        .ok_or_else(|| Error::Config(format!("ensemble has no aux channel '{channel}'")))?;
    drift_test(&ens.times, v, threshold)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HittingOptions {
    /// Step of the fine monitoring grid.
    pub dt: f64,
    /// The coarse grid checks every `coarse_factor`-th fine step.
    pub coarse_factor: usize,
    /// Paths not through the level by this time count as unfinished.
    pub horizon: f64,
    /// Largest tolerated relative first-passage bias of the fine grid.
    pub bias_tol: f64,
}

impl Default for HittingOptions {
    fn default() -> Self {
        HittingOptions { dt: 2e-5, coarse_factor: 4, horizon: 50.0, bias_tol: 0.02 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HittingEstimate {
    /// Extrapolated mean 2T_fine − T_coarse, whose per-path version removes
    /// the leading √dt monitoring bias.
    pub mean: f64,
    pub se: f64,
    pub fine_mean: f64,
    pub coarse_mean: f64,
    /// |T_coarse − T_fine| / mean, the size of the fine-grid bias.
    pub bias_estimate: f64,
    pub n_paths: usize,
    pub unfinished: usize,
    /// Set when the bias estimate exceeds tolerance or more than 0.1% of
    /// paths did not finish.
    pub flagged: bool,
}

/// Mean first time |x_t| ≥ a from x_0 = 0, simulated through the exact
/// squared-Bessel transitions of s_t = 4|x_t|^{ν+2}/(ν+2)² on a fine grid
/// and a coarse sub-grid of the same paths.
pub fn hitting_time_mean(p: &NuParam, a: f64, n_paths: usize, seed: u64, opts: HittingOptions) -> Result<HittingEstimate> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("level must be > 0, got {a}")));
    }
    if n_paths < 2 || !(opts.dt > 0.0) || opts.coarse_factor < 2 || !(opts.horizon > opts.dt) {
        return Err(Error::Config("hitting time needs n_paths >= 2, dt > 0, coarse_factor >= 2, horizon > dt".into()));
    }
    let level = besq_coordinate(p.nu, a);
    let delta = besq_dimension(p.nu);
    let max_steps = (opts.horizon / opts.dt).ceil() as u64;
    let cf = opts.coarse_factor as u64;
    let per_path: Vec<Option<(f64, f64)>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let mut s = 0.0;
            let mut fine = None;
            for k in 1..=max_steps {
                s = besq_step(delta, s, opts.dt, &mut rng);
                if s >= level {
                    if fine.is_none() {
                        fine = Some(k as f64 * opts.dt);
                    }
                    if k % cf == 0 {
                        return Some((fine.unwrap(), k as f64 * opts.dt));
                    }
                }
            }
            None
        })
        .collect();
    let done: Vec<(f64, f64)> = per_path.iter().flatten().copied().collect();
    let unfinished = n_paths - done.len();
    if done.len() < 2 {
        return Err(Error::Numeric("fewer than two paths reached the level before the horizon".into()));
    }
    let fine: Vec<f64> = done.iter().map(|d| d.0).collect();
    let coarse: Vec<f64> = done.iter().map(|d| d.1).collect();
    let extrap: Vec<f64> = done.iter().map(|d| 2.0 * d.0 - d.1).collect();
    let (mean, se) = mean_se(&extrap);
    let (fine_mean, _) = mean_se(&fine);
    let (coarse_mean, _) = mean_se(&coarse);
    let bias_estimate = (coarse_mean - fine_mean).abs() / mean;
    let flagged = bias_estimate > opts.bias_tol || unfinished as f64 > 1e-3 * n_paths as f64;
    Ok(HittingEstimate { mean, se, fine_mean, coarse_mean, bias_estimate, n_paths, unfinished, flagged })
}

/// (2/(ν+2)) a^{ν+2}.
pub fn hitting_time_exact(p: &NuParam, a: f64) -> f64 {
    2.0 / (p.nu + 2.0) * a.powf(p.nu + 2.0)
}

/// Envelope values at or below this are rounding noise.
pub const VANISHING: f64 = 1e-12;

/// How one N-dependent bound scales with N.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeFit {
    pub name: String,
    pub ns: Vec<f64>,
    /// The sup (or 1/inf) of the bounded quantity at each N.
    pub values: Vec<f64>,
    /// Expected log-log slope in N; `None` for N-uniform bounds.
    pub expected_slope: Option<f64>,
    pub slope: f64,
    /// values · N^{−expected}, the fitted constant at each N.
    pub constants: Vec<f64>,
}

impl EnvelopeFit {
    fn new(name: &str, ns: &[f64], values: Vec<f64>, expected_slope: Option<f64>) -> Result<Self> {
        let lx: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
        let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let (slope, _) = linear_fit(&lx, &ly)?;
        let e = expected_slope.unwrap_or(0.0);
        let constants = ns.iter().zip(&values).map(|(n, v)| v * n.powf(-e)).collect();
        Ok(EnvelopeFit { name: name.into(), ns: ns.to_vec(), values, expected_slope, slope, constants })
    }

    /// max/min of the fitted constants.
    pub fn constant_ratio(&self) -> f64 {
        let mx = self.constants.iter().fold(f64::MIN, |a, &b| a.max(b));
        let mn = self.constants.iter().fold(f64::MAX, |a, &b| a.min(b));
        mx / mn
    }

    /// Relative slope error, or 0 for N-uniform bounds.
    pub fn slope_error(&self) -> f64 {
        match self.expected_slope {
            Some(e) => ((self.slope - e) / e).abs(),
            None => 0.0,
        }
    }

    /// The bounded quantity is zero up to rounding at every N, so the bound
    /// holds for any constant and there is no slope to fit.
    pub fn vanishes(&self) -> bool {
        self.expected_slope.is_some() && self.values.iter().all(|v| *v <= VANISHING)
    }

    pub fn passed(&self, slope_tol: f64, max_ratio: f64) -> bool {
        if self.vanishes() {
            return true;
        }
        let c_ok = self.constants.iter().all(|c| c.is_finite() && *c > 0.0) && self.constant_ratio() < max_ratio;
        c_ok && self.slope_error() <= slope_tol
    }
}

#[derive(Default)]
struct Sups {
    y_diff: f64,
    q_inner: f64,
    q_outer: f64,
    a_inf: f64,
    y_over_yn: f64,
    yn_over_y: f64,
    qn_over_q: f64,
}

#[allow(clippy::too_many_arguments)]
fn accumulate(s: &mut Sups, p: &NuParam, n: f64, x: f64, yn: f64, qn: f64, an: f64, inner: bool) {
    let nu = p.nu;
    let y = y_limit(p, x);
    let eps_scale = n.powf(-nu * p.char_exp);
    s.y_diff = s.y_diff.max((yn - y).abs() / (eps_scale + x.abs().powf(nu)));
    let dq = (qn - q_limit(p, yn)).abs();
    if inner {
        s.q_inner = s.q_inner.max(dq);
    } else {
        s.q_outer = s.q_outer.max(dq / yn.abs().powf((nu - 1.0) / (nu + 1.0)));
    }
    if an.is_finite() {
        s.a_inf = s.a_inf.min(an);
    }
    if yn != 0.0 {
        s.y_over_yn = s.y_over_yn.max(y.abs() / yn.abs());
    }
    s.yn_over_y = s.yn_over_y.max(yn.abs() / (1.0 + y.abs()));
    s.qn_over_q = s.qn_over_q.max(qn / (1.0 + q_limit(p, yn)));
}

fn fits(p: &NuParam, ns: &[f64], sups: Vec<Sups>) -> Result<Vec<EnvelopeFit>> {
    let a = p.char_exp;
    let col = |f: &dyn Fn(&Sups) -> f64| sups.iter().map(f).collect::<Vec<f64>>();
    Ok(vec![
        EnvelopeFit::new("|Y_N - Y| / (N^(-nu/(nu+2)) + |x|^nu)", ns, col(&|s| s.y_diff), Some(-a))?,
        EnvelopeFit::new("|Q_N - Q| inner", ns, col(&|s| s.q_inner), Some(-p.nu * a))?,
        EnvelopeFit::new("|Q_N - Q| / |y|^((nu-1)/(nu+1)) outer", ns, col(&|s| s.q_outer), Some(-a))?,
        EnvelopeFit::new("1 / inf A_N", ns, col(&|s| 1.0 / s.a_inf), None)?,
        EnvelopeFit::new("|Y| / |Y_N|", ns, col(&|s| s.y_over_yn), None)?,
        EnvelopeFit::new("|Y_N| / (1 + |Y|)", ns, col(&|s| s.yn_over_y), None)?,
        EnvelopeFit::new("Q_N / (1 + Q)", ns, col(&|s| s.qn_over_q), None)?,
    ])
}

/// Sampled sups of the continuum coordinate bounds over |x| ≤ x_max,
/// one fit per bound across `ns`.
pub fn continuum_envelopes(model: &SdeModel, ns: &[f64], x_max: f64) -> Result<Vec<EnvelopeFit>> {
    let p = model.p;
    let sups = ns
        .iter()
        .map(|&n| {
            let map = ContinuumMap::new(model.clone(), n)?;
            let lo = (map.x_core() * 1e-4).ln();
            let hi = x_max.ln();
            let m = 4000;
            let y_star = n.powf(-(p.nu + 1.0) * p.char_exp);
            let mut s = Sups { a_inf: f64::INFINITY, ..Default::default() };
            // the map at 0 itself gives the inner Q gap
            accumulate(&mut s, &p, n, 0.0, 0.0, map.q_n_at_x(0.0), f64::INFINITY, true);
            for k in 0..=m {
                let x = (lo + (hi - lo) * k as f64 / m as f64).exp();
                for x in [x, -x] {
                    let yn = map.y_n(x)?;
                    let qn = map.q_n_at_x(x);
                    let an = 2.0 * yn.abs().powf(-p.nu / (p.nu + 1.0)) / ((p.nu + 2.0) * map.d_n(x));
                    accumulate(&mut s, &p, n, x, yn, qn, an, yn.abs() <= y_star);
                }
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    fits(&p, ns, sups)
}

/// The lattice analogue over sites with |x| ≤ x_max; the inner Q bound
/// is the single point y = 0.
pub fn discrete_envelopes(rates: &RateModel, ns: &[f64], x_max: f64) -> Result<Vec<EnvelopeFit>> {
    let p = NuParam::new(rates.nu)?;
    let sups = ns
        .iter()
        .map(|&n| {
            let scale = n.powf(p.char_exp);
            let n_lim = (x_max * scale).ceil() as i64;
            let map = DiscreteMap::new(rates.clone(), n, n_lim as usize + 1)?;
            let yscale = n.powf(-(p.nu + 1.0) * p.char_exp);
            let qscale = n.powf(-p.nu * p.char_exp);
            let mut s = Sups { a_inf: f64::INFINITY, ..Default::default() };
            for site in -n_lim..=n_lim {
                let x = site as f64 / scale;
                let yn = yscale * map.y_hat(site);
                let qn = qscale * map.q_hat(site);
                let an = map.a_hat(site);
                accumulate(&mut s, &p, n, x, yn, qn, an, site == 0);
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    fits(&p, ns, sups)
}
