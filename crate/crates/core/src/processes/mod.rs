//! Path samplers: the limit diffusion (kernel chain and squared-Bessel
//! steps), the rescaled diffusion with generator ½ d/dx D^{(N)} d/dx, and
//! the nearest-neighbour walk.

pub mod besq;
pub mod ctrw;
pub mod limit;
pub mod models;
pub mod sde;

use crate::eigen::NuParam;
use crate::error::{Error, Result};
use std::io::{Read, Write};

pub use besq::{besq_chain, besq_step};
pub use ctrw::{sample_ctrw_paths, CtrwOptions};
pub use limit::{sample_limit_paths, LimitOptions, TableCache};
pub use models::{Diffusivity, RateModel, SdeModel};
pub use sde::{sample_sde_paths, SdeOptions, SdeScheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProcessKind {
    Limit,
    Sde,
    Ctrw,
}

impl ProcessKind {
    fn code(self) -> u8 {
        match self {
            ProcessKind::Limit => 0,
            ProcessKind::Sde => 1,
            ProcessKind::Ctrw => 2,
        }
    }

    fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(ProcessKind::Limit),
            1 => Ok(ProcessKind::Sde),
            2 => Ok(ProcessKind::Ctrw),
            _ => Err(Error::Io(format!("unknown process kind code {c}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProcessKind::Limit => "limit",
            ProcessKind::Sde => "sde",
            ProcessKind::Ctrw => "ctrw",
        }
    }
}

impl std::str::FromStr for ProcessKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "limit" => Ok(ProcessKind::Limit),
            "sde" => Ok(ProcessKind::Sde),
            "ctrw" => Ok(ProcessKind::Ctrw),
            _ => Err(Error::Config(format!("unknown process kind '{s}' (limit, sde, ctrw)"))),
        }
    }
}

/// Trajectories on a shared time grid. `paths[i][k]` is path i at
/// `times[k]`; positions are already rescaled by N^{-1/(ν+2)} in space
/// and 1/N in time.
#[derive(Clone, Debug)]
pub struct PathEnsemble {
    pub p: NuParam,
    pub times: Vec<f64>,
    pub paths: Vec<Vec<f64>>,
    pub seed: u64,
    pub rescale_n: f64,
    pub kind: ProcessKind,
    /// Extra per-path channels on the same grid (for example a running
    /// compensator or occupation time).
    pub aux: Vec<(String, Vec<Vec<f64>>)>,
}

const MAGIC: &[u8; 4] = b"SDPE";
const VERSION: u32 = 1;

/// Checks that `times` starts at 0 and increases strictly.
pub fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times[0] != 0.0 {
        return Err(Error::Config("time grid must start at 0".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || !times.iter().all(|t| t.is_finite()) {
        return Err(Error::Config("time grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

impl PathEnsemble {
    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    /// Positions of every path at grid index k.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p[k]).collect()
    }

    pub fn aux_channel(&self, name: &str) -> Option<&Vec<Vec<f64>>> {
        self.aux.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Long-format CSV: `path_id,t,x` plus one column per aux channel.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "path_id,t,x")?;
        for (name, _) in &self.aux {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for (i, path) in self.paths.iter().enumerate() {
            for (k, t) in self.times.iter().enumerate() {
                write!(w, "{i},{t},{}", path[k])?;
                for (_, ch) in &self.aux {
                    write!(w, ",{}", ch[i][k])?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }

    /// Binary layout, all little-endian:
    /// magic `SDPE`, u32 version, f64 ν, f64 N, u8 kind, u64 seed,
    /// u64 n_times, u64 n_paths, n_times f64 grid, then n_paths × n_times
    /// f64 positions row-major by path. Aux channels are not stored.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&self.p.nu.to_le_bytes())?;
        w.write_all(&self.rescale_n.to_le_bytes())?;
        w.write_all(&[self.kind.code()])?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&(self.times.len() as u64).to_le_bytes())?;
        w.write_all(&(self.paths.len() as u64).to_le_bytes())?;
        for t in &self.times {
            w.write_all(&t.to_le_bytes())?;
        }
        for path in &self.paths {
            for x in path {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Io("not a path-ensemble file (bad magic)".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        let mut b1 = [0u8; 1];
        r.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != VERSION {
            return Err(Error::Io(format!("unsupported path-ensemble version {version}")));
        }
        let mut f64_in = |r: &mut R| -> Result<f64> {
            r.read_exact(&mut b8)?;
            Ok(f64::from_le_bytes(b8))
        };
        let nu = f64_in(&mut r)?;
        let rescale_n = f64_in(&mut r)?;
        r.read_exact(&mut b1)?;
        let kind = ProcessKind::from_code(b1[0])?;
        let mut u = [0u8; 8];
        r.read_exact(&mut u)?;
        let seed = u64::from_le_bytes(u);
        r.read_exact(&mut u)?;
        let nt = u64::from_le_bytes(u) as usize;
        r.read_exact(&mut u)?;
        let np = u64::from_le_bytes(u) as usize;
        let mut times = Vec::with_capacity(nt);
        for _ in 0..nt {
            times.push(f64_in(&mut r)?);
        }
        let mut paths = Vec::with_capacity(np);
        for _ in 0..np {
            let mut row = Vec::with_capacity(nt);
            for _ in 0..nt {
                row.push(f64_in(&mut r)?);
            }
            paths.push(row);
        }
        Ok(PathEnsemble { p: NuParam::new(nu)?, times, paths, seed, rescale_n, kind, aux: Vec::new() })
    }

    /// The same paths viewed at scale `factor` further out:
    /// x ↦ factor^{-1/(ν+2)} x, t ↦ t / factor.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 1.0) || !factor.is_finite() {
            return Err(Error::Config(format!("rescaling factor must be finite and >= 1, got {factor}")));
        }
        let s = factor.powf(-self.p.char_exp);
        let mut out = self.clone();
        out.times = self.times.iter().map(|t| t / factor).collect();
        out.paths = self.paths.iter().map(|p| p.iter().map(|x| x * s).collect()).collect();
        out.rescale_n = self.rescale_n * factor;
        Ok(out)
    }

    /// Mean over paths of sup_{k: t_k ≤ t} |X_{t_k}|, for each grid time.
    pub fn running_sup_mean(&self) -> Vec<f64> {
        let nt = self.times.len();
        let mut acc = vec![0.0; nt];
        for path in &self.paths {
            let mut m = 0.0f64;
            for k in 0..nt {
                m = m.max(path[k].abs());
                acc[k] += m;
            }
        }
        let n = self.paths.len() as f64;
        acc.iter().map(|v| v / n).collect()
    }
}
