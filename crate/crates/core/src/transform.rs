//! Generalized characteristic functions E[e^{(ν)}(qX)] and the transform
//! g̃(q) = ∫ conj(e^{(ν)}(qx)) g(x) dx with its inverse
//! g(x) = (1/(4u²)) ∫ e^{(ν)}(qx) g̃(q) dq.

use crate::eigen::{e_nu, ComplexValue, NuParam};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integrate_breaks, QuadSpec};
use rayon::prelude::*;
use std::io::Write;
use std::sync::Arc;

/// Monte Carlo estimate of a generalized characteristic function at q.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CFEstimate {
    pub q: f64,
    pub mean: ComplexValue,
    pub se_re: f64,
    pub se_im: f64,
    pub n: usize,
}

impl CFEstimate {
    /// Standard error of |mean − target|, treating the parts as independent.
    pub fn se(&self) -> f64 {
        self.se_re.hypot(self.se_im)
    }
}

/// Sample mean of e^{(ν)}(q x_i) with separate standard errors for the
/// real and imaginary parts.
pub fn gcf_estimate(p: &NuParam, samples: &[f64], q: f64) -> Result<CFEstimate> {
    if samples.is_empty() {
        return Err(Error::Domain("characteristic function of an empty sample".into()));
    }
    let n = samples.len();
    let vals: Vec<ComplexValue> = samples.par_iter().map(|&x| e_nu(p, q * x)).collect();
    let nf = n as f64;
    let (sr, si) = vals.iter().fold((0.0, 0.0), |(a, b), v| (a + v.re, b + v.im));
    let (mr, mi) = (sr / nf, si / nf);
    let (se_re, se_im) = if n > 1 {
        let (vr, vi) = vals
            .iter()
            .fold((0.0, 0.0), |(a, b), v| (a + (v.re - mr).powi(2), b + (v.im - mi).powi(2)));
        ((vr / (nf - 1.0) / nf).sqrt(), (vi / (nf - 1.0) / nf).sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(CFEstimate { q, mean: ComplexValue::new(mr, mi), se_re, se_im, n })
}

/// Empirical ν/4 moment, the quantity whose uniform bound makes
/// characteristic-function convergence imply vague convergence.
pub fn quarter_moment(p: &NuParam, samples: &[f64]) -> f64 {
    samples.iter().map(|x| x.abs().powf(p.nu / 4.0)).sum::<f64>() / samples.len().max(1) as f64
}

/// e^{−t|q|^{ν+2}/2} e^{(ν)}(q x0), the characteristic function of the
/// limit diffusion at time t started from x0.
pub fn gcf_target(p: &NuParam, q: f64, t: f64, x0: f64) -> Result<ComplexValue> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    Ok(e_nu(p, q * x0).scale((-0.5 * t * q.abs().powf(p.nu + 2.0)).exp()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfGapRow {
    pub estimate: CFEstimate,
    pub target: ComplexValue,
    pub gap: f64,
}

/// Estimate versus target on every q of the grid.
pub fn cf_gap_table(p: &NuParam, samples: &[f64], q_grid: &[f64], t: f64, x0: f64) -> Result<Vec<CfGapRow>> {
    q_grid
        .iter()
        .map(|&q| {
            let estimate = gcf_estimate(p, samples, q)?;
            let target = gcf_target(p, q, t, x0)?;
            let gap = (estimate.mean - target).abs();
            Ok(CfGapRow { estimate, target, gap })
        })
        .collect()
}

/// Largest gap over the table and the standard error at that q.
pub fn max_gap(rows: &[CfGapRow]) -> (f64, f64) {
    rows.iter().fold((0.0, 0.0), |acc, r| if r.gap > acc.0 { (r.gap, r.estimate.se()) } else { acc })
}

/// CSV with columns q, re, im, se_re, se_im, target_re, target_im.
pub fn write_cf_csv<W: Write>(rows: &[CfGapRow], mut w: W) -> Result<()> {
    writeln!(w, "q,re,im,se_re,se_im,target_re,target_im")?;
    for r in rows {
        let e = &r.estimate;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            e.q, e.mean.re, e.mean.im, e.se_re, e.se_im, r.target.re, r.target.im
        )?;
    }
    Ok(())
}

/// A real function with compact support [lo, hi], smooth between `kinks`.
#[derive(Clone)]
pub struct CompactFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub lo: f64,
    pub hi: f64,
    pub kinks: Vec<f64>,
}

impl std::fmt::Debug for CompactFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CompactFunction [{}, {}] kinks {:?}", self.lo, self.hi, self.kinks)
    }
}

/// C^∞ step from 0 at s ≤ 0 to 1 at s ≥ 1.
pub fn smooth_step(s: f64) -> f64 {
    let psi = |s: f64| if s <= 0.0 { 0.0 } else { (-1.0 / s).exp() };
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = psi(s);
        a / (a + psi(1.0 - s))
    }
}

impl CompactFunction {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, lo: f64, hi: f64, kinks: Vec<f64>) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Config(format!("empty support [{lo}, {hi}]")));
        }
        Ok(CompactFunction { f: Arc::new(f), lo, hi, kinks })
    }

    /// Even bump: 1 on |x| ≤ inner, 0 on |x| ≥ outer, C^∞ in between.
    pub fn plateau(inner: f64, outer: f64) -> Result<Self> {
        if !(outer > inner && inner >= 0.0) {
            return Err(Error::Config(format!("plateau needs 0 <= inner < outer, got {inner}, {outer}")));
        }
        let f = move |x: f64| smooth_step((outer - x.abs()) / (outer - inner));
        Self::new(f, -outer, outer, vec![-inner, 0.0, inner])
    }

    /// C^∞ bump supported on [a, b], vanishing near 0 when 0 ∉ (a, b).
    pub fn bump(a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(Error::Config(format!("bump needs a < b, got {a}, {b}")));
        }
        let m = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let f = move |x: f64| smooth_step((h - (x - m).abs()) / h);
        let mut kinks = vec![m];
        if a < 0.0 && b > 0.0 {
            kinks.push(0.0);
        }
        Self::new(f, a, b, kinks)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            0.0
        } else {
            (self.f)(x)
        }
    }

    /// Largest |x| on the support.
    pub fn radius(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    fn breaks(&self) -> Vec<f64> {
        let mut b = vec![self.lo, self.hi];
        b.extend(self.kinks.iter().copied().filter(|&k| k > self.lo && k < self.hi));
        if self.lo < 0.0 && self.hi > 0.0 {
            b.push(0.0);
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// Adds points where the phase |q x|^c / c crosses multiples of π.
fn phase_breaks(p: &NuParam, q: f64, base: &[f64]) -> Vec<f64> {
    let c = p.c();
    let aq = q.abs();
    let mut out = base.to_vec();
    if aq > 0.0 {
        let (lo, hi) = (base[0], *base.last().unwrap());
        let r_max = lo.abs().max(hi.abs());
        let k_max = ((aq * r_max).powf(c) / c / std::f64::consts::PI).floor() as usize;
        for k in 1..=k_max {
            let x = (c * k as f64 * std::f64::consts::PI).powf(1.0 / c) / aq;
            for s in [x, -x] {
                if s > lo && s < hi {
                    out.push(s);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// ∫ |g| (1 + |x|^{ν/4}) dx, finite for every admissible g.
pub fn dm_norm(p: &NuParam, g: &CompactFunction, spec: &QuadSpec) -> Result<f64> {
    let r = integrate_breaks(|x| [g.eval(x).abs() * (1.0 + x.abs().powf(p.nu / 4.0))], &g.breaks(), spec)?;
    let v = r.value[0];
    if !v.is_finite() {
        return Err(Error::Numeric("test function is not integrable against dm".into()));
    }
    Ok(v)
}

/// g̃(q) by adaptive quadrature over phase panels.
pub fn forward_at(p: &NuParam, g: &CompactFunction, q: f64, spec: &QuadSpec) -> Result<ComplexValue> {
    let br = phase_breaks(p, q, &g.breaks());
    let r = integrate_breaks(
        |x| {
            let e = e_nu(p, q * x);
            let v = g.eval(x);
            [e.re * v, -e.im * v]
        },
        &br,
        spec,
    )?;
    Ok(ComplexValue::new(r.value[0], r.value[1]))
}

/// g̃ on a grid of frequencies, in parallel.
pub fn forward_transform(p: &NuParam, g: &CompactFunction, q_grid: &[f64], spec: &QuadSpec) -> Result<Vec<ComplexValue>> {
    dm_norm(p, g, spec)?;
    q_grid.par_iter().map(|&q| forward_at(p, g, q, spec)).collect()
}

/// g̃ sampled at the nodes of a composite Gauss–Legendre rule on [0, q_max].
/// Panels end where q^c (R^c + x_reach^c)/c crosses multiples of 2π, so the
/// rule integrates g̃ against e^{(ν)}(q x) for |x| ≤ x_reach.
#[derive(Clone, Debug)]
pub struct SpectralSamples {
    pub p: NuParam,
    pub q: Vec<f64>,
    pub w: Vec<f64>,
    pub values: Vec<ComplexValue>,
}

pub fn spectral_samples(
    p: &NuParam,
    g: &CompactFunction,
    q_max: f64,
    x_reach: f64,
    spec: &QuadSpec,
) -> Result<SpectralSamples> {
    if !(q_max > 0.0) {
        return Err(Error::Config(format!("q_max must be > 0, got {q_max}")));
    }
    let c = p.c();
    let rate = (g.radius().powf(c) + x_reach.abs().powf(c)) / c;
    let n_panels = ((q_max.powf(c) * rate / (2.0 * std::f64::consts::PI)).ceil() as usize).max(16);
    // panel edges equally spaced in q^c
    let mut edges: Vec<f64> = (1..=n_panels).map(|k| q_max * (k as f64 / n_panels as f64).powf(1.0 / c)).collect();
    // geometric grading into 0, where g̃ has a |q|^{ν+2} term
    let first = edges[0];
    let mut grade: Vec<f64> = (1..12).map(|j| first * 0.25f64.powi(j)).collect();
    grade.push(0.0);
    grade.reverse();
    grade.extend(edges);
    edges = grade;
    let (gx, gw) = gauss_legendre(16);
    let mut q = Vec::with_capacity(n_panels * 16);
    let mut w = Vec::with_capacity(n_panels * 16);
    for e in edges.windows(2) {
        let (m, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
        for (xi, wi) in gx.iter().zip(&gw) {
            q.push(m + h * xi);
            w.push(h * wi);
        }
    }
    let values = q.par_iter().map(|&qq| forward_at(p, g, qq, spec)).collect::<Result<Vec<_>>>()?;
    Ok(SpectralSamples { p: *p, q, w, values })
}

/// (1/(4u²)) ∫_{−Q}^{Q} e^{(ν)}(q x) g̃(q) dq at each x, for real g
/// (so g̃(−q) = conj g̃(q)).
pub fn inverse_transform(s: &SpectralSamples, xs: &[f64]) -> Vec<ComplexValue> {
    let norm = 1.0 / (4.0 * s.p.u_nu * s.p.u_nu);
    xs.par_iter()
        .map(|&x| {
            let mut acc = ComplexValue::ZERO;
            for ((&q, &w), &v) in s.q.iter().zip(&s.w).zip(&s.values) {
                let ep = e_nu(&s.p, q * x);
                let em = e_nu(&s.p, -q * x);
                acc = acc + (ep * v + em * v.conj()).scale(w);
            }
            acc.scale(norm)
        })
        .collect()
}

/// First q on the grid 2^{k/2} from which |g̃(q)|(1 + |q|^{ν/4}) stays below
/// `tol` for three consecutive grid points.
pub fn decay_cutoff(p: &NuParam, g: &CompactFunction, tol: f64, spec: &QuadSpec) -> Result<f64> {
    let step = 2f64.sqrt();
    let mut q = 1.0;
    let mut quiet = 0;
    while q < 1e4 {
        let v = forward_at(p, g, q, spec)?.abs() * (1.0 + q.powf(p.nu / 4.0));
        quiet = if v < tol { quiet + 1 } else { 0 };
        if quiet >= 3 {
            return Ok(q / step.powi(2));
        }
        q *= step;
    }
    Err(Error::Numeric(format!("transform does not decay below {tol:e} before q = 1e4")))
}

/// |∫ g h dx − (1/(4u²)) ∫ conj(g̃) h̃ dq| / (‖g‖₂ ‖h‖₂) for real g, h.
pub fn plancherel_residual(
    p: &NuParam,
    g: &CompactFunction,
    h: &CompactFunction,
    q_max: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    dm_norm(p, g, spec)?;
    dm_norm(p, h, spec)?;
    let mut br = g.breaks();
    br.extend(h.breaks());
    br.sort_by(f64::total_cmp);
    br.dedup();
    let r = integrate_breaks(
        |x| {
            let (a, b) = (g.eval(x), h.eval(x));
            [a * b, a * a, b * b]
        },
        &br,
        spec,
    )?;
    let [inner, gg, hh] = r.value;
    let sg = spectral_samples(p, g, q_max, h.radius(), spec)?;
    let sh_values = sg.q.par_iter().map(|&q| forward_at(p, h, q, spec)).collect::<Result<Vec<_>>>()?;
    let mut spectral = 0.0;
    for ((&w, a), b) in sg.w.iter().zip(&sg.values).zip(&sh_values) {
        // both halves of the line: 2 Re(conj(g̃) h̃)
        spectral += 2.0 * w * (a.re * b.re + a.im * b.im);
    }
    spectral /= 4.0 * p.u_nu * p.u_nu;
    Ok((inner - spectral).abs() / (gg * hh).sqrt())
}

/// |g̃(q)| / (1 + |q|^{ν/4}) on the grid.
pub fn tail_profile(p: &NuParam, g: &CompactFunction, q_grid: &[f64], spec: &QuadSpec) -> Result<Vec<f64>> {
    let v = forward_transform(p, g, q_grid, spec)?;
    Ok(v.iter().zip(q_grid).map(|(z, q)| z.abs() / (1.0 + q.abs().powf(p.nu / 4.0))).collect())
}

/// Maxima of `values` over consecutive decades of `q_grid` (q > 0).
pub fn decade_maxima(q_grid: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (&q, &v) in q_grid.iter().zip(values) {
        let d = q.log10().floor();
        match out.last_mut() {
            Some((dd, m)) if *dd == d => *m = m.max(v),
            _ => out.push((d, v)),
        }
    }
    out
}
