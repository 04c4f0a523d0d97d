//! Kernel-chain sampler for the limit diffusion.
//!
//! By scale invariance φ_dt(x, x') = s^{-1} φ_1(x/s, x'/s) with
//! s = dt^{1/(ν+2)}, so every step reuses unit-time tables. Tables sit on a
//! lattice of sources in r = sgn(ξ)|ξ|^{ν/2+1}; a source between two lattice
//! points draws from one of them with linear weights, which reproduces the
//! kernel to second order in the lattice spacing.

use super::{validate_times, PathEnsemble, ProcessKind};
use crate::eigen::NuParam;
use crate::error::{Error, Result};
use crate::kernel::{build_kernel_table, from_r, sample_from_table, to_r, KernelTable};
use crate::rng::{stream, RandomStream};
use rand::Rng;
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitOptions {
    /// Points per kernel table.
    pub resolution: usize,
    /// Source lattice spacing in r.
    pub dr: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions { resolution: 512, dr: 0.05 }
    }
}

/// Unit-time kernel tables keyed by source lattice index. Built in phases
/// (`ensure`), read-only while sampling.
pub struct TableCache {
    p: NuParam,
    opts: LimitOptions,
    tables: HashMap<i64, Arc<KernelTable>>,
}

impl TableCache {
    pub fn new(p: NuParam, opts: LimitOptions) -> Result<Self> {
        if !(opts.dr > 0.0) {
            return Err(Error::Config(format!("table lattice spacing must be > 0, got {}", opts.dr)));
        }
        Ok(TableCache { p, opts, tables: HashMap::new() })
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    fn scale(&self, dt: f64) -> f64 {
        dt.powf(self.p.char_exp)
    }

    /// Lattice indices a step of length dt from x may use.
    pub fn indices_for(&self, x: f64, dt: f64) -> (i64, i64) {
        let r = to_r(&self.p, x / self.scale(dt)) / self.opts.dr;
        let j = r.floor() as i64;
        (j, j + 1)
    }

    /// Builds any missing tables, in parallel.
    pub fn ensure(&mut self, needed: impl IntoIterator<Item = i64>) -> Result<()> {
        let missing: Vec<i64> = needed.into_iter().filter(|j| !self.tables.contains_key(j)).collect();
        let built: Vec<Result<(i64, KernelTable)>> = missing
            .par_iter()
            .map(|&j| {
                let src = from_r(&self.p, j as f64 * self.opts.dr);
                build_kernel_table(&self.p, 1.0, src, self.opts.resolution).map(|t| (j, t))
            })
            .collect();
        for b in built {
            let (j, t) = b?;
            self.tables.insert(j, Arc::new(t));
        }
        Ok(())
    }

    /// One transition over dt from x. Tables for `indices_for(x, dt)` must
    /// already be present.
    pub fn step<R: Rng + ?Sized>(&self, x: f64, dt: f64, rng: &mut R) -> f64 {
        let s = self.scale(dt);
        let r = to_r(&self.p, x / s) / self.opts.dr;
        let j0 = r.floor();
        let w = r - j0;
        let j = if rng.random::<f64>() < w { j0 as i64 + 1 } else { j0 as i64 };
        let t = self.tables.get(&j).expect("kernel table built before sampling");
        s * sample_from_table(t, rng)
    }
}

/// Markov chain over `times` with exact-in-law kernel steps (up to table
/// interpolation). Path i uses random stream (seed, i).
pub fn sample_limit_paths(
    p: &NuParam,
    x0: f64,
    times: &[f64],
    n_paths: usize,
    seed: u64,
    opts: LimitOptions,
) -> Result<PathEnsemble> {
    validate_times(times)?;
    if n_paths == 0 {
        return Err(Error::Config("need at least one path".into()));
    }
    let mut cache = TableCache::new(*p, opts)?;
    let mut rngs: Vec<RandomStream> = (0..n_paths as u64).map(|i| stream(seed, i)).collect();
    let mut xs = vec![x0; n_paths];
    let mut paths: Vec<Vec<f64>> = (0..n_paths).map(|_| Vec::with_capacity(times.len())).collect();
    for (path, &x) in paths.iter_mut().zip(&xs) {
        path.push(x);
    }
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let needed: BTreeSet<i64> = xs
            .iter()
            .flat_map(|&x| {
                let (a, b) = cache.indices_for(x, dt);
                [a, b]
            })
            .collect();
        cache.ensure(needed)?;
        let c = &cache;
        xs.par_iter_mut().zip(rngs.par_iter_mut()).for_each(|(x, rng)| {
            *x = c.step(*x, dt, rng);
        });
        for (path, &x) in paths.iter_mut().zip(&xs) {
            path.push(x);
        }
    }
    Ok(PathEnsemble {
        p: *p,
        times: times.to_vec(),
        paths,
        seed,
        rescale_n: 1.0,
        kind: ProcessKind::Limit,
        aux: Vec::new(),
    })
}
