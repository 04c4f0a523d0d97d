//! Rescaled diffusion X^{(N)} with generator ½ d/dx D^{(N)} d/dx.
//!
//! The default scheme steps the driftless coordinate M = Y_N(X),
//! dM = σ(M) dω with σ = √Q_N, and maps back through W_N. Each step is the
//! simplified weak order-2 Taylor update
//! ΔM = σΔW + ½σσ'(ΔW² − h) + ¼σ²σ''ΔW h
//! (plain Euler–Maruyama when σ'' is unavailable), with h shrunk near the
//! origin so that one step moves M by about κ(|M| + y_core). The direct scheme integrates
//! dX = ½ D'(X) dt + √D(X) dω with a fixed step and is only offered for ν ≥ 1.

use super::{validate_times, PathEnsemble, ProcessKind, SdeModel};
use crate::error::{Error, Result};
use crate::martingale::maps::ContinuumMap;
use crate::rng::stream;
use crate::processes::models::Diffusivity;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdeScheme {
    Martingale,
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdeOptions {
    pub scheme: SdeScheme,
    /// Steps per unit of rescaled time; caps the step everywhere.
    pub steps_per_unit: f64,
    /// Step control for the martingale scheme. `None` gives plain fixed-step EM.
    pub kappa: Option<f64>,
    /// When set, records the aux channel `occupation`: cumulative time with
    /// |Y_N(X_r)| at or below this level.
    pub occupation_threshold: Option<f64>,
    /// Largest allowed h·sup|b'| for the direct scheme.
    pub stability_limit: f64,
    /// Adds the second-order weak Taylor terms to the martingale scheme
    /// (regularized D with ν ≥ 1 only; plain EM otherwise).
    pub weak_order2: bool,
}

impl Default for SdeOptions {
    fn default() -> Self {
        SdeOptions {
            scheme: SdeScheme::Martingale,
            steps_per_unit: 1000.0,
            kappa: Some(0.25),
            occupation_threshold: None,
            stability_limit: 0.5,
            weak_order2: true,
        }
    }
}

/// Drift b = ½ D^{(N)}'(x), analytic for the regularized family.
fn drift(map: &ContinuumMap, x: f64) -> f64 {
    let p = map.p();
    match (&map.model.d, map.model.epsilon(map.n)) {
        (Diffusivity::Regularized { .. }, Some(e)) => {
            let a = x.abs();
            let den = e + a.powf(p.nu);
            -0.5 * p.nu * x.signum() * a.powf(p.nu - 1.0) / (den * den)
        }
        _ => {
            let h = 1e-6 * (x.abs() + map.x_core());
            0.25 * (map.d_n(x + h) - map.d_n(x - h)) / h
        }
    }
}

/// sup |b'| sampled on a geometric grid around the core, excluding 0.
pub fn drift_lipschitz(map: &ContinuumMap) -> f64 {
    let xc = map.x_core();
    let mut s = 0.0f64;
    for k in -40..=40 {
        let x = xc * 10f64.powf(k as f64 / 16.0);
        for x in [x, -x] {
            let h = 1e-4 * x.abs();
            let d = ((drift(map, x + h) - drift(map, x - h)) / (2.0 * h)).abs();
            if d.is_finite() {
                s = s.max(d);
            }
        }
    }
    s
}

struct PathOut {
    xs: Vec<f64>,
    occ: Vec<f64>,
}

/// σ(y) = √Q_N(y) and its first two y-derivatives at x = W_N(y), for
/// D^{(N)} = 1/(ε + |x|^ν).
fn sigma_derivs(nu: f64, eps: f64, x: f64) -> (f64, f64, f64) {
    let k = nu + 1.0;
    let a = x.abs();
    let sg = x.signum();
    let an2 = if nu == 2.0 { 1.0 } else { a.powf(nu - 2.0) };
    let an1 = if nu == 2.0 { a } else { a.powf(nu - 1.0) };
    let s = eps + an1 * a;
    let s1 = nu * sg * an1;
    let s2 = if nu == 1.0 { 0.0 } else { nu * (nu - 1.0) * an2 };
    let rs = s.sqrt();
    let b = k * rs;
    let b1 = 0.5 * s1 / (s * rs);
    let b2 = (0.5 * s2 / (s * rs) - 0.75 * s1 * s1 / (s * s * rs)) / (k * s);
    (b, b1, b2)
}

fn run_martingale<R: Rng>(map: &ContinuumMap, x0: f64, times: &[f64], o: &SdeOptions, rng: &mut R) -> Result<PathOut> {
    let h_max = 1.0 / o.steps_per_unit;
    let order2 = match (o.weak_order2, map.model.epsilon(map.n)) {
        (true, Some(e)) if map.p().nu >= 1.0 => Some(e),
        _ => None,
    };
    let nu = map.p().nu;
    let y_core = map.y_core();
    let mut x = x0;
    let mut y = map.y_n(x0)?;
    let mut xs = vec![x];
    let mut occ = vec![0.0];
    let mut occupied = 0.0;
    for w in times.windows(2) {
        let mut t = w[0];
        while t < w[1] {
            let q = map.q_n_at_x(x);
            let mut h = h_max.min(w[1] - t);
            if let Some(k) = o.kappa {
                let a = y.abs() + y_core;
                h = h.min(k * k * a * a / q);
            }
            if let Some(thr) = o.occupation_threshold {
                if y.abs() <= thr {
                    occupied += h;
                }
            }
            let z: f64 = rng.sample(StandardNormal);
            match order2 {
                Some(e) => {
                    let (b, b1, b2) = sigma_derivs(nu, e, x);
                    let dw = h.sqrt() * z;
                    y += b * dw + 0.5 * b * b1 * (dw * dw - h) + 0.25 * b * b * b2 * dw * h;
                }
                None => y += (q * h).sqrt() * z,
            }
            x = map.w_n_from(y, x);
            if !x.is_finite() {
                return Err(Error::Numeric(format!("W_N inversion failed at y = {y}")));
            }
            // Guard against the last step overshooting by rounding.
            t = if w[1] - t - h <= 1e-15 * w[1] { w[1] } else { t + h };
        }
        xs.push(x);
        occ.push(occupied);
    }
    Ok(PathOut { xs, occ })
}

fn run_direct<R: Rng>(map: &ContinuumMap, x0: f64, times: &[f64], o: &SdeOptions, rng: &mut R) -> Result<PathOut> {
    let h_max = 1.0 / o.steps_per_unit;
    let mut x = x0;
    let mut xs = vec![x];
    let mut occ = vec![0.0];
    let mut occupied = 0.0;
    for w in times.windows(2) {
        let n_steps = ((w[1] - w[0]) / h_max).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / n_steps as f64;
        let sh = h.sqrt();
        for _ in 0..n_steps {
            if let Some(thr) = o.occupation_threshold {
                if map.y_n(x)?.abs() <= thr {
                    occupied += h;
                }
            }
            let z: f64 = rng.sample(StandardNormal);
            x += drift(map, x) * h + map.d_n(x).sqrt() * sh * z;
        }
        if !x.is_finite() {
            return Err(Error::Numeric("direct Euler–Maruyama diverged".into()));
        }
        xs.push(x);
        occ.push(occupied);
    }
    Ok(PathOut { xs, occ })
}

/// Paths of N^{-1/(ν+2)} X_{Nt} started at the rescaled point x0. Path i
/// uses random stream (seed, i), so results do not depend on scheduling.
pub fn sample_sde_paths(
    model: &SdeModel,
    n: f64,
    x0: f64,
    times: &[f64],
    n_paths: usize,
    seed: u64,
    opts: SdeOptions,
) -> Result<PathEnsemble> {
    validate_times(times)?;
    if n_paths == 0 {
        return Err(Error::Config("need at least one path".into()));
    }
    if !(opts.steps_per_unit > 0.0) {
        return Err(Error::Config(format!("steps_per_unit must be > 0, got {}", opts.steps_per_unit)));
    }
    if let Some(k) = opts.kappa {
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::Config(format!("kappa must lie in (0, 1), got {k}")));
        }
    }
    let map = ContinuumMap::new(model.clone(), n)?;
    if opts.scheme == SdeScheme::Direct {
        if model.p.nu < 1.0 {
            return Err(Error::Config(format!(
                "direct scheme needs nu >= 1 (drift is singular at 0), got {}",
                model.p.nu
            )));
        }
        let h = 1.0 / opts.steps_per_unit;
        let l = drift_lipschitz(&map);
        if h * l > opts.stability_limit {
            return Err(Error::Config(format!(
                "step {h:.3e} too large: h*sup|b'| = {:.3e} exceeds {}; need steps_per_unit >= {:.3e}",
                h * l,
                opts.stability_limit,
                l / opts.stability_limit
            )));
        }
    }
    let outs: Vec<Result<PathOut>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            match opts.scheme {
                SdeScheme::Martingale => run_martingale(&map, x0, times, &opts, &mut rng),
                SdeScheme::Direct => run_direct(&map, x0, times, &opts, &mut rng),
            }
        })
        .collect();
    let mut paths = Vec::with_capacity(n_paths);
    let mut occ = Vec::with_capacity(n_paths);
    for o in outs {
        let o = o?;
        paths.push(o.xs);
        occ.push(o.occ);
    }
    let mut aux = Vec::new();
    if opts.occupation_threshold.is_some() {
        aux.push(("occupation".to_string(), occ));
    }
    Ok(PathEnsemble { p: model.p, times: times.to_vec(), paths, seed, rescale_n: n, kind: ProcessKind::Sde, aux })
}
