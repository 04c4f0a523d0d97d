//! Experiment configuration: flat `key = value` lines grouped under
//! `[section]` headers, `#` comments, keys before any header belong to
//! `[experiment]`. See the README for the full key list.

use crate::error::{Error, Result};
use crate::processes::{ProcessKind, SdeOptions, SdeScheme};
use std::path::PathBuf;

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Largest allowed CF gap at the last scale.
    pub final_gap: f64,
    /// Standard-error multiple allowed for a gap increase between scales.
    pub se_mult: f64,
    /// Multiplies every default tolerance of the invariant suite.
    pub invariant_scale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { final_gap: 0.02, se_mult: 3.0, invariant_scale: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub nu: f64,
    pub kind: ProcessKind,
    pub n_list: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub t_list: Vec<f64>,
    pub x0: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub tolerances: Tolerances,
    pub sde: SdeOptions,
    /// ν values for the invariant suite.
    pub nu_grid: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            nu: 2.0,
            kind: ProcessKind::Sde,
            n_list: vec![1e2, 1e3, 1e4],
            q_grid: linspace(-2.0, 2.0, 41),
            t_list: vec![1.0],
            x0: 0.0,
            n_paths: 100_000,
            seed: 1,
            out_dir: PathBuf::from("scalediff-out"),
            tolerances: Tolerances::default(),
            sde: SdeOptions::default(),
            nu_grid: vec![0.5, 1.0, 2.0, 3.0],
        }
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn num(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.trim().parse().map_err(|_| Error::Config(format!("{key}: '{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn num_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let v = v.trim();
    if v.is_empty() {
        return Err(Error::Config(format!("{key}: empty list")));
    }
    v.split(',').map(|s| num(key, s)).collect()
}

/// `start:stop:count` or a comma-separated list.
pub fn parse_grid(key: &str, v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').collect();
    match parts.len() {
        1 => num_list(key, v),
        3 => {
            let n: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{key}: bad count '{}'", parts[2])))?;
            if n == 0 {
                return Err(Error::Config(format!("{key}: count must be >= 1")));
            }
            Ok(linspace(num(key, parts[0])?, num(key, parts[1])?, n))
        }
        _ => Err(Error::Config(format!("{key}: expected start:stop:count or a list, got '{v}'"))),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut section = "experiment".to_string();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {}: unterminated section header", i + 1)))?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(&section, k.trim(), v.trim())
                .map_err(|e| Error::Config(format!("line {}: {}", i + 1, e.message())))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, section: &str, key: &str, v: &str) -> Result<()> {
        match (section, key) {
            ("experiment", "nu") => self.nu = num(key, v)?,
            ("experiment", "process") => self.kind = v.parse()?,
            ("experiment", "N_list") => self.n_list = num_list(key, v)?,
            ("experiment", "q_grid") => self.q_grid = parse_grid(key, v)?,
            ("experiment", "t_list") => self.t_list = num_list(key, v)?,
            ("experiment", "x0") => self.x0 = num(key, v)?,
            ("experiment", "n_paths") => {
                self.n_paths = v.parse().map_err(|_| Error::Config(format!("n_paths: '{v}' is not a count")))?
            }
            ("experiment", "seed") => {
                self.seed = v.parse().map_err(|_| Error::Config(format!("seed: '{v}' is not an integer")))?
            }
            ("experiment", "out") => self.out_dir = PathBuf::from(v),
            ("tolerances", "final_gap") => self.tolerances.final_gap = num(key, v)?,
            ("tolerances", "se_mult") => self.tolerances.se_mult = num(key, v)?,
            ("tolerances", "invariant_scale") => self.tolerances.invariant_scale = num(key, v)?,
            ("sde", "scheme") => {
                self.sde.scheme = match v {
                    "martingale" => SdeScheme::Martingale,
                    "direct" => SdeScheme::Direct,
                    _ => return Err(Error::Config(format!("scheme: unknown '{v}' (martingale, direct)"))),
                }
            }
            ("sde", "steps_per_unit") => self.sde.steps_per_unit = num(key, v)?,
            ("sde", "kappa") => {
                self.sde.kappa = if v == "none" { None } else { Some(num(key, v)?) };
            }
            ("sde", "weak_order2") => {
                self.sde.weak_order2 = v.parse().map_err(|_| Error::Config(format!("weak_order2: '{v}' is not a bool")))?
            }
            ("invariants", "nu_grid") => self.nu_grid = num_list(key, v)?,
            _ => return Err(Error::Config(format!("unknown key '{key}' in section [{section}]"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::Config(format!("nu must be > 0, got {}", self.nu)));
        }
        if self.n_list.is_empty() || self.n_list.iter().any(|n| !(*n >= 1.0)) {
            return Err(Error::Config("every scale in N_list must be >= 1".into()));
        }
        if self.q_grid.is_empty() || self.q_grid.iter().any(|q| !q.is_finite()) {
            return Err(Error::Config("q_grid must be a non-empty list of finite values".into()));
        }
        if self.t_list.is_empty() || self.t_list.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Config("t_list must contain positive times".into()));
        }
        if self.n_paths < 100 {
            return Err(Error::Config(format!("n_paths must be >= 100, got {}", self.n_paths)));
        }
        if self.nu_grid.iter().any(|n| !(*n > 0.0)) {
            return Err(Error::Config("nu_grid entries must be > 0".into()));
        }
        if !(self.tolerances.invariant_scale >= 0.0) || !(self.tolerances.final_gap >= 0.0) {
            return Err(Error::Config("tolerances must be >= 0".into()));
        }
        Ok(())
    }
}
