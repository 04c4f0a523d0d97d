//! Experiment orchestration: convergence studies of the rescaled samplers
//! against the limit characteristic function, and the kernel invariant
//! suite. Every result is written as CSV plus a plot description that
//! references those CSVs.

pub mod config;

pub use config::{linspace, parse_grid, ExperimentConfig, Tolerances};

use crate::eigen::{eigen_residual_sup, NuParam, Stencil};
use crate::error::{Error, Result};
use crate::kernel::{build_kernel_table, chapman_kolmogorov_residual, heat_residual, normalization, phi, phi_spectral};
use crate::processes::{
    sample_ctrw_paths, sample_limit_paths, sample_sde_paths, CtrwOptions, LimitOptions, PathEnsemble, ProcessKind,
    RateModel, SdeModel,
};
use crate::quad::QuadSpec;
use crate::stats::ks_one_sample;
use crate::transform::{cf_gap_table, write_cf_csv, CfGapRow};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CRITERION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Independent seed for the k-th scale of a study.
pub fn scale_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Samples `kind` at scale `n` on the grid {0} ∪ t_list.
#[allow(clippy::too_many_arguments)]
pub fn sample_ensemble(
    kind: ProcessKind,
    p: &NuParam,
    n: f64,
    x0: f64,
    t_list: &[f64],
    n_paths: usize,
    seed: u64,
    sde: crate::processes::SdeOptions,
) -> Result<PathEnsemble> {
    let mut times = vec![0.0];
    times.extend_from_slice(t_list);
    match kind {
        ProcessKind::Sde => sample_sde_paths(&SdeModel::default_model(*p), n, x0, &times, n_paths, seed, sde),
        ProcessKind::Ctrw => {
            let n0 = (x0 * n.powf(p.char_exp)).round() as i64;
            sample_ctrw_paths(&RateModel::default_model(p.nu), n, n0, &times, n_paths, seed, CtrwOptions::default())
        }
        ProcessKind::Limit => sample_limit_paths(p, x0, &times, n_paths, seed, LimitOptions::default()),
    }
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?))
}

fn tag(v: f64) -> String {
    format!("{v}").replace('.', "p").replace('-', "m")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    /// Scale; infinite for the limit-sampler control.
    pub n: f64,
    pub t: f64,
    pub max_gap: f64,
    /// Standard error at the q of the largest gap.
    pub se: f64,
    pub q_at_max: f64,
    /// KS distance between the samples and the tabulated kernel CDF.
    pub ks: f64,
    /// Largest gap measured in units of its own standard error.
    pub max_z: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub control: Vec<ConvergenceRow>,
    pub violations: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_CRITERION
        }
    }
}

fn summarize(n: f64, t: f64, rows: &[CfGapRow], ks: f64) -> ConvergenceRow {
    let mut best = ConvergenceRow { n, t, max_gap: 0.0, se: 0.0, q_at_max: f64::NAN, ks, max_z: 0.0 };
    for r in rows {
        let se = r.estimate.se();
        if r.gap > best.max_gap || best.q_at_max.is_nan() {
            best.max_gap = r.gap;
            best.se = se;
            best.q_at_max = r.estimate.q;
        }
        let z = if se > 0.0 { r.gap / se } else if r.gap > 0.0 { f64::INFINITY } else { 0.0 };
        best.max_z = best.max_z.max(z);
    }
    best
}

/// Trend check on one t-series of rows ordered by N: each gap may exceed
/// its predecessor by at most `se_mult` combined standard errors, and the
/// last gap must be below `final_gap`.
pub fn trend_violations(rows: &[ConvergenceRow], tol: &Tolerances) -> Vec<String> {
    let mut v = Vec::new();
    for w in rows.windows(2) {
        let allowed = w[0].max_gap + tol.se_mult * w[0].se.hypot(w[1].se);
        if !(w[1].max_gap <= allowed) {
            v.push(format!(
                "t={}: gap rose from {:.5} at N={} to {:.5} at N={} (allowed {:.5})",
                w[1].t, w[0].max_gap, w[0].n, w[1].max_gap, w[1].n, allowed
            ));
        }
    }
    if let Some(last) = rows.last() {
        if !(last.max_gap < tol.final_gap) {
            v.push(format!(
                "t={}: final gap {:.5} at N={} is not below {}",
                last.t, last.max_gap, last.n, tol.final_gap
            ));
        }
    }
    v
}

/// Writes the study and returns its summary. With `control` set, the limit
/// sampler is run as an N = ∞ reference and every q must agree with the
/// target within `se_mult` standard errors.
pub fn run_convergence(cfg: &ExperimentConfig, control: bool) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let p = NuParam::new(cfg.nu)?;
    let out = &cfg.out_dir;
    fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let mut files = Vec::new();
    let tables: Vec<_> = cfg
        .t_list
        .iter()
        .map(|&t| build_kernel_table(&p, t, cfg.x0, 1024))
        .collect::<Result<_>>()?;

    let mut study = |n: f64, kind: ProcessKind, seed: u64, label: &str| -> Result<Vec<ConvergenceRow>> {
        let ens = sample_ensemble(kind, &p, n, cfg.x0, &cfg.t_list, cfg.n_paths, seed, cfg.sde)?;
        let mut rows = Vec::new();
        for (j, &t) in cfg.t_list.iter().enumerate() {
            let xs = ens.column(j + 1);
            let gaps = cf_gap_table(&p, &xs, &cfg.q_grid, t, cfg.x0)?;
            let path = out.join(format!("cf_{label}_t{}.csv", tag(t)));
            write_cf_csv(&gaps, create(&path)?)?;
            files.push(path);
            let ks = ks_one_sample(&xs, |y| tables[j].cdf_at(y));
            rows.push(summarize(n, t, &gaps, ks));
        }
        Ok(rows)
    };

    let mut rows = Vec::new();
    for (k, &n) in cfg.n_list.iter().enumerate() {
        rows.extend(study(n, cfg.kind, scale_seed(cfg.seed, k), &format!("N{}", tag(n)))?);
    }
    let control_rows = if control { study(f64::INFINITY, ProcessKind::Limit, scale_seed(cfg.seed, usize::MAX - 1), "limit")? } else { Vec::new() };

    let mut violations = Vec::new();
    for &t in &cfg.t_list {
        let series: Vec<ConvergenceRow> = rows.iter().filter(|r| r.t == t).cloned().collect();
        violations.extend(trend_violations(&series, &cfg.tolerances));
    }
    for r in &control_rows {
        if !(r.max_z < cfg.tolerances.se_mult) {
            violations.push(format!(
                "t={}: limit control deviates by {:.2} standard errors",
                r.t, r.max_z
            ));
        }
    }

    let csv = out.join("convergence.csv");
    let mut w = create(&csv)?;
    writeln!(w, "n,t,max_gap,se,q_at_max,ks,max_z")?;
    for r in rows.iter().chain(&control_rows) {
        writeln!(w, "{},{},{},{},{},{},{}", r.n, r.t, r.max_gap, r.se, r.q_at_max, r.ks, r.max_z)?;
    }
    w.flush()?;
    files.push(csv);

    let plot = out.join("convergence.plot");
    fs::write(&plot, convergence_plot(cfg, &files, control))?;
    files.push(plot);
    Ok(ConvergenceReport { rows, control: control_rows, violations, files })
}

fn convergence_plot(cfg: &ExperimentConfig, files: &[PathBuf], control: bool) -> String {
    let mut s = String::from("# scalediff plot description v1\n");
    let _ = write!(
        s,
        "\n[plot]\ntitle = max CF gap vs N (nu={}, {})\ndata = convergence.csv\nx = n\nx_scale = log\ny_scale = log\nseries = max_gap\nerror = se\ngroup = t\n",
        cfg.nu,
        cfg.kind.name()
    );
    if control {
        s.push_str("exclude = n=inf\n");
    }
    for f in files {
        let name = f.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if name.starts_with("cf_") {
            let _ = write!(
                s,
                "\n[plot]\ntitle = {name}\ndata = {name}\nx = q\nseries = re, target_re, im, target_im\nerror = se_re, none, se_im, none\n"
            );
        }
    }
    s
}

/// One row of the invariant suite.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantRow {
    pub name: String,
    pub nu: f64,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub rows: Vec<InvariantRow>,
    pub files: Vec<PathBuf>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_CRITERION
        }
    }
}

type Check = (&'static str, f64, fn(&NuParam) -> Result<f64>);

fn max_over<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    let mut m = 0.0f64;
    for v in it {
        let v = v?;
        if !v.is_finite() {
            return Ok(f64::NAN);
        }
        m = m.max(v);
    }
    Ok(m)
}

const PTS: [f64; 4] = [-1.3, -0.2, 0.4, 1.7];

fn check_normalization(p: &NuParam) -> Result<f64> {
    let spec = QuadSpec::new(1e-12, 1e-11, 20_000);
    max_over([0.3, 1.0].iter().flat_map(|&t| [0.0, 0.5, -2.0].map(|x| normalization(p, t, x, &spec).map(|v| (v - 1.0).abs()))))
}

fn check_chapman_kolmogorov(p: &NuParam) -> Result<f64> {
    let spec = QuadSpec::new(1e-12, 1e-11, 20_000);
    max_over([(0.2, 0.5, 0.7, -0.4), (0.5, 0.5, -1.1, 1.5), (1.0, 0.3, 0.0, 0.9)].map(|(s, t, x, y)| {
        chapman_kolmogorov_residual(p, s, t, x, y, &spec)
    }))
}

fn check_spectral(p: &NuParam) -> Result<f64> {
    let spec = QuadSpec::new(1e-12, 1e-10, 200_000);
    max_over([(1.0, 0.4, -0.8), (0.5, 1.2, 0.9)].map(|(t, x, y)| {
        Ok((phi_spectral(p, t, x, y, &spec)? - phi(p, t, x, y)?).abs())
    }))
}

fn check_symmetry(p: &NuParam) -> Result<f64> {
    max_over(PTS.iter().flat_map(|&x| {
        PTS.map(move |y| {
            let a = phi(p, 0.7, x, y)?;
            let b = phi(p, 0.7, y, x)?;
            let c = phi(p, 0.7, -x, -y)?;
            Ok(((a - b).abs().max((a - c).abs())) / a.abs().max(f64::MIN_POSITIVE))
        })
    }))
}

fn check_scaling(p: &NuParam) -> Result<f64> {
    max_over([2.0, 10.0, 100.0].iter().flat_map(|&n: &f64| {
        let s = n.powf(p.char_exp);
        PTS.map(move |x| {
            let base = phi(p, 0.8, x, 0.6)?;
            Ok((s * phi(p, 0.8 * n, s * x, s * 0.6)? - base).abs())
        })
    }))
}

fn check_positivity(p: &NuParam) -> Result<f64> {
    let mut worst = 0.0f64;
    for &t in &[0.05, 1.0, 20.0] {
        for &x in &PTS {
            for k in -40..=40 {
                let v = phi(p, t, x, 0.1 * k as f64)?;
                if !v.is_finite() {
                    return Ok(f64::NAN);
                }
                worst = worst.max(-v);
            }
        }
    }
    Ok(worst)
}

fn check_heat(p: &NuParam) -> Result<f64> {
    max_over([(0.6, 0.5), (-1.0, 1.4), (0.8, -0.7)].map(|(x, y)| heat_residual(p, 1.0, x, y, 1e-4, 1e-4)))
}

fn check_eigen(p: &NuParam) -> Result<f64> {
    let xs: Vec<f64> = (0..=40).flat_map(|k| {
        let x = 0.1 * 100f64.powf(k as f64 / 40.0);
        [x, -x]
    })
    .collect();
    Ok([0.5, 1.0, 2.0].iter().map(|&q| eigen_residual_sup(p, q, &xs, 1e-4, Stencil::FivePoint)).fold(0.0, f64::max))
}

/// Name, default tolerance, check. Tolerances are multiplied by
/// `invariant_scale` and compared with a strict `<`.
pub const INVARIANTS: &[Check] = &[
    ("normalization", 1e-6, check_normalization),
    ("chapman_kolmogorov", 1e-6, check_chapman_kolmogorov),
    ("spectral_vs_closed_form", 1e-8, check_spectral),
    ("symmetry", 1e-12, check_symmetry),
    ("scale_invariance", 1e-9, check_scaling),
    ("positivity", 1e-300, check_positivity),
    ("heat_equation", 1e-4, check_heat),
    ("eigen_identity", 1e-6, check_eigen),
];

/// Runs every invariant at every ν of `cfg.nu_grid`, writes
/// invariants.csv (name, nu, value, tolerance, pass) and returns the rows
/// in (ν, invariant) order.
pub fn run_invariants(cfg: &ExperimentConfig) -> Result<InvariantReport> {
    cfg.validate()?;
    let params: Vec<NuParam> = cfg.nu_grid.iter().map(|&nu| NuParam::new(nu)).collect::<Result<_>>()?;
    let jobs: Vec<(NuParam, &Check)> = params.iter().flat_map(|p| INVARIANTS.iter().map(move |c| (*p, c))).collect();
    let scale = cfg.tolerances.invariant_scale;
    let rows: Vec<InvariantRow> = jobs
        .par_iter()
        .map(|(p, (name, tol, f))| {
            let value = match f(p) {
                Ok(v) => v,
                Err(Error::Numeric(_)) => f64::NAN,
                Err(e) => return Err(e),
            };
            let tolerance = tol * scale;
            Ok(InvariantRow { name: name.to_string(), nu: p.nu, value, tolerance, pass: value < tolerance })
        })
        .collect::<Result<_>>()?;
    let out = &cfg.out_dir;
    fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let csv = out.join("invariants.csv");
    let mut w = create(&csv)?;
    writeln!(w, "name,nu,value,tolerance,pass")?;
    for r in &rows {
        writeln!(w, "{},{},{:e},{:e},{}", r.name, r.nu, r.value, r.tolerance, r.pass)?;
    }
    w.flush()?;
    let plot = out.join("invariants.plot");
    fs::write(
        &plot,
        "# scalediff plot description v1\n\n[plot]\ntitle = invariant residuals\ndata = invariants.csv\nx = nu\ny_scale = log\nseries = value, tolerance\ngroup = name\n",
    )?;
    Ok(InvariantReport { rows, files: vec![csv, plot] })
}
