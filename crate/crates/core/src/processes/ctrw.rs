//! Event-driven nearest-neighbour walk with rates R_n^±, recorded on a grid
//! and rescaled to N^{-1/(ν+2)} X_{Nt}.

use super::{validate_times, PathEnsemble, ProcessKind, RateModel};
use crate::eigen::NuParam;
use crate::error::{Error, Result};
use crate::martingale::maps::{sub_exponent, DiscreteMap};
use crate::rng::stream;
use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CtrwOptions {
    /// Jumps allowed per path before giving up.
    pub max_events: u64,
    /// Records aux channel `compensated`:
    /// N^{-1}(|Ŷ(X_{Ns})|^p − |Ŷ(n0)|^p − ∫_0^{Ns} Â(X_r) dr), p = (ν+2)/(ν+1).
    pub compensator: bool,
}

impl Default for CtrwOptions {
    fn default() -> Self {
        CtrwOptions { max_events: 100_000_000, compensator: false }
    }
}

/// Bond rates cached on a window around 0.
struct BondCache<'a> {
    rates: &'a RateModel,
    off: i64,
    c: Vec<f64>,
}

impl<'a> BondCache<'a> {
    fn new(rates: &'a RateModel, half: i64) -> Self {
        let c = (-half..=half).map(|n| rates.rate_plus(n)).collect();
        BondCache { rates, off: half, c }
    }

    #[inline]
    fn bond(&self, n: i64) -> f64 {
        let i = n + self.off;
        if i >= 0 && (i as usize) < self.c.len() {
            self.c[i as usize]
        } else {
            self.rates.rate_plus(n)
        }
    }
}

struct WalkOut {
    xs: Vec<i64>,
    comp: Vec<f64>,
}

fn run_walk<R: Rng>(
    bonds: &BondCache,
    map: Option<&DiscreteMap>,
    n0: i64,
    grid: &[f64],
    max_events: u64,
    rng: &mut R,
) -> Result<WalkOut> {
    let mut n = n0;
    let mut t = 0.0;
    let mut events = 0u64;
    let mut xs = Vec::with_capacity(grid.len());
    let mut comp = Vec::new();
    let e = map.map(|m| sub_exponent(&m.p));
    let base = map.map_or(0.0, |m| m.y_hat(n0).abs().powf(e.unwrap()));
    let mut integral = 0.0;
    let mut a_cur = map.map_or(0.0, |m| m.a_hat(n));
    let mut k = 0;
    loop {
        let up = bonds.bond(n);
        let dn = bonds.bond(n - 1);
        let total = up + dn;
        let hold: f64 = rng.sample::<f64, _>(Exp1) / total;
        let t_next = t + hold;
        while k < grid.len() && grid[k] < t_next {
            xs.push(n);
            if let Some(m) = map {
                let acc = integral + a_cur * (grid[k] - t);
                comp.push(m.y_hat(n).abs().powf(e.unwrap()) - base - acc);
            }
            k += 1;
        }
        if k == grid.len() {
            break;
        }
        integral += a_cur * hold;
        t = t_next;
        n += if rng.random::<f64>() * total < up { 1 } else { -1 };
        if let Some(m) = map {
            a_cur = m.a_hat(n);
        }
        events += 1;
        if events > max_events {
            return Err(Error::Numeric(format!("event budget {max_events} exhausted at t = {t:.3e}, n = {n}")));
        }
    }
    Ok(WalkOut { xs, comp })
}

/// Paths of the walk started at lattice site n0, observed at rescaled
/// `times` (unscaled time N·t) and rescaled in space by N^{-1/(ν+2)}.
pub fn sample_ctrw_paths(
    rates: &RateModel,
    n: f64,
    n0: i64,
    times: &[f64],
    n_paths: usize,
    seed: u64,
    opts: CtrwOptions,
) -> Result<PathEnsemble> {
    validate_times(times)?;
    if n_paths == 0 {
        return Err(Error::Config("need at least one path".into()));
    }
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::Config(format!("scale N must be finite and >= 1, got {n}")));
    }
    let p = NuParam::new(rates.nu)?;
    let t_max = *times.last().unwrap();
    let reach = (n * t_max).powf(p.char_exp);
    let half = (n0.unsigned_abs() as f64 + 12.0 * reach + 16.0).min(1e7) as i64;
    rates.validate(half + 1)?;
    let bonds = BondCache::new(rates, half + 1);
    let map = if opts.compensator { Some(DiscreteMap::new(rates.clone(), n, half as usize)?) } else { None };
    let grid: Vec<f64> = times.iter().map(|t| t * n).collect();
    let outs: Vec<Result<WalkOut>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            run_walk(&bonds, map.as_ref(), n0, &grid, opts.max_events, &mut rng)
        })
        .collect();
    let scale = n.powf(-p.char_exp);
    let mut paths = Vec::with_capacity(n_paths);
    let mut comp = Vec::with_capacity(n_paths);
    for o in outs {
        let o = o?;
        paths.push(o.xs.iter().map(|&m| m as f64 * scale).collect());
        comp.push(o.comp.iter().map(|c| c / n).collect());
    }
    let mut aux = Vec::new();
    if opts.compensator {
        aux.push(("compensated".to_string(), comp));
    }
    Ok(PathEnsemble { p, times: times.to_vec(), paths, seed, rescale_n: n, kind: ProcessKind::Ctrw, aux })
}
