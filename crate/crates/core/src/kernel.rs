//! Transition density φ_t(x, x') of the singular diffusion, its spectral
//! representation, and tabulated CDFs for exact-in-law sampling.

use crate::eigen::{e_nu, ComplexValue, NuParam};
use crate::error::{Error, Result};
use crate::quad::{gk15, integrate_breaks, QuadSpec};
use crate::specfun::{i_scaled_asymptotic, k_scaled_asymptotic, normalized_series, DoubleDouble, SpecFunAccuracy};
use rand::Rng;
use std::f64::consts::PI;

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("kernel time must be finite and > 0, got {t}")));
    }
    Ok(())
}

/// φ_t(x, x').
///
/// The Bessel bracket is summed as a regularized series while its
/// argument z = |xx'|^{ν/2+1}/(t(ν/2+1)²) is at most the series switch
/// (so x x' = 0 needs no special casing beyond the closed form), and
/// through scaled Hankel expansions beyond, where the e^{±z} factors are
/// folded into the Gaussian-like exponent.
pub fn phi(p: &NuParam, t: f64, x: f64, x_prime: f64) -> Result<f64> {
    check_time(t)?;
    let nu = p.nu;
    let c = p.c();
    let b = p.beta;
    let ax = x.abs();
    let axp = x_prime.abs();
    let two_tc2 = 2.0 * t * c * c;
    if ax == 0.0 || axp == 0.0 {
        let y = ax.max(axp);
        return Ok((-y.powf(nu + 2.0) / two_tc2).exp() / (p.n_nu * t.powf(p.char_exp)));
    }
    let rx = ax.powf(c);
    let rxp = axp.powf(c);
    let z = rx * rxp / (t * c * c);
    let same_sign = (x > 0.0) == (x_prime > 0.0);
    let acc = SpecFunAccuracy::default();
    if z <= acc.series_switch {
        let damp = (-(rx * rx + rxp * rxp) / two_tc2).exp();
        let lead = two_tc2.powf(b) / p.gamma_one_minus_beta();
        let sub = (ax * axp).powf(nu + 1.0) * two_tc2.powf(-b) / p.gamma_one_plus_beta();
        let w = 0.25 * z * z;
        let bracket = if same_sign {
            lead * normalized_series(-b, w, acc.max_series_terms) + sub * normalized_series(b, w, acc.max_series_terms)
        } else {
            // I_{-β} − I_β cancels to about e^{-2z} relative; double-double keeps the digits
            let dd = DoubleDouble::new;
            let wd = dd(0.25) * dd(z) * dd(z);
            let a = dd(lead) * normalized_series(dd(-b), wd, acc.max_series_terms);
            let s = dd(sub) * normalized_series(dd(b), wd, acc.max_series_terms);
            (a - s).to_f64().max(0.0)
        };
        return Ok(damp * bracket / (t * (nu + 2.0)));
    }
    let pref = (ax * axp).powf(0.5 * (nu + 1.0)) / (t * (nu + 2.0));
    if same_sign {
        let g = (rx - rxp) * (rx - rxp) / two_tc2;
        let m = acc.max_series_terms;
        Ok(pref * (-g).exp() * (i_scaled_asymptotic(-b, z, m) + i_scaled_asymptotic(b, z, m)))
    } else {
        let g = (rx + rxp) * (rx + rxp) / two_tc2;
        Ok(pref * (2.0 / PI) * (b * PI).sin() * k_scaled_asymptotic(b, z, acc.max_series_terms) * (-g).exp())
    }
}

/// Leading small-t form: Gaussian in sgn(x)|x|^{ν/2+1}, supported on the
/// side of the origin containing x.
pub fn phi_small_t(p: &NuParam, t: f64, x: f64, x_prime: f64) -> Result<f64> {
    check_time(t)?;
    let c = p.c();
    let s = if (x > 0.0) == (x_prime > 0.0) && x != 0.0 && x_prime != 0.0 { 2.0 } else { 0.0 };
    let d = x.abs().powf(c) - x_prime.abs().powf(c);
    Ok((x * x_prime).abs().powf(0.25 * p.nu) / (2.0 * (2.0 * PI * t).sqrt()) * s * (-d * d / (2.0 * t * c * c)).exp())
}

/// Tail scale (2 dt)^{1/(ν+2)} (ν/2+1)^{2/(ν+2)} of φ_dt in x.
pub fn tail_scale(p: &NuParam, dt: f64) -> f64 {
    (2.0 * dt).powf(p.char_exp) * p.c().powf(2.0 * p.char_exp)
}

/// sgn(x)|x|^{ν/2+1}: the coordinate in which φ_t is close to Gaussian
/// with standard deviation (ν/2+1)√t.
pub fn to_r(p: &NuParam, x: f64) -> f64 {
    x.signum() * x.abs().powf(p.c())
}

pub fn from_r(p: &NuParam, r: f64) -> f64 {
    r.signum() * r.abs().powf(1.0 / p.c())
}

/// Integration breakpoints in x' for φ_t(x, ·): equal steps of the
/// r-coordinate standard deviation out to ±`width` of them, plus 0.
pub fn kernel_breaks(p: &NuParam, t: f64, x: f64, width: f64) -> Vec<f64> {
    let sd = p.c() * t.sqrt();
    let r0 = to_r(p, x);
    let n = (2.0 * width).ceil() as i64;
    let mut v: Vec<f64> = (-n..=n).map(|k| from_r(p, r0 + 0.5 * k as f64 * sd)).collect();
    v.push(0.0);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// ∫ φ_t(x, y) dy.
pub fn normalization(p: &NuParam, t: f64, x: f64, spec: &QuadSpec) -> Result<f64> {
    check_time(t)?;
    let br = kernel_breaks(p, t, x, 14.0);
    let r = integrate_breaks(|y| [phi(p, t, x, y).unwrap_or(f64::NAN)], &br, spec)?;
    Ok(r.value[0])
}

/// |∫ φ_s(x, y) φ_t(y, x') dy − φ_{s+t}(x, x')|.
pub fn chapman_kolmogorov_residual(p: &NuParam, s: f64, t: f64, x: f64, x_prime: f64, spec: &QuadSpec) -> Result<f64> {
    check_time(s)?;
    check_time(t)?;
    let mut br = kernel_breaks(p, s, x, 14.0);
    br.extend(kernel_breaks(p, t, x_prime, 14.0));
    br.sort_by(f64::total_cmp);
    br.dedup();
    let r = integrate_breaks(
        |y| [phi(p, s, x, y).unwrap_or(f64::NAN) * phi(p, t, y, x_prime).unwrap_or(f64::NAN)],
        &br,
        spec,
    )?;
    Ok((r.value[0] - phi(p, s + t, x, x_prime)?).abs())
}

/// |∂_t φ − L φ| at (t, x, x') with a centred time difference of step
/// `tau` and the midpoint flux stencil of step `h` in x'.
pub fn heat_residual(p: &NuParam, t: f64, x: f64, x_prime: f64, tau: f64, h: f64) -> Result<f64> {
    if tau >= t {
        return Err(Error::Config(format!("time step {tau} must be below t = {t}")));
    }
    let f = |tt: f64, y: f64| phi(p, tt, x, y);
    let dt = (f(t + tau, x_prime)? - f(t - tau, x_prime)?) / (2.0 * tau);
    let a = |y: f64| y.abs().powf(-p.nu);
    let u0 = f(t, x_prime)?;
    let up = f(t, x_prime + h)?;
    let um = f(t, x_prime - h)?;
    let lu = 0.5 * (a(x_prime + 0.5 * h) * (up - u0) - a(x_prime - 0.5 * h) * (u0 - um)) / (h * h);
    Ok((dt - lu).abs())
}

/// Truncation point for the spectral integral: the e^{-t q^{ν+2}/2}
/// envelope times the plane-wave growth drops below `tol`.
fn spectral_cutoff(p: &NuParam, t: f64, x: f64, x_prime: f64, tol: f64) -> f64 {
    let g = |q: f64| (1.0 + (q * x).abs().powf(0.25 * p.nu)) * (1.0 + (q * x_prime).abs().powf(0.25 * p.nu));
    let mut q: f64 = 1.0;
    for _ in 0..50 {
        let next = (2.0 / t * ((1.0 / tol).ln() + g(q).ln() + 1.0)).powf(1.0 / (p.nu + 2.0));
        if (next - q).abs() < 1e-9 * q {
            return next;
        }
        q = next;
    }
    q
}

/// (1/(4u²)) ∫ e^{-t|q|^{ν+2}/2} e(qx) conj(e(qx')) dq as a complex number.
///
/// Panels end at successive π increments of the combined phase
/// (|qx|^{ν/2+1} + |qx'|^{ν/2+1})/(ν/2+1); the two half-lines are
/// integrated on mirrored panels.
pub fn phi_spectral_complex(p: &NuParam, t: f64, x: f64, x_prime: f64, spec: &QuadSpec) -> Result<ComplexValue> {
    check_time(t)?;
    let qmax = spectral_cutoff(p, t, x, x_prime, spec.abs_tol * 1e-2);
    let c = p.c();
    let phase_rate = (x.abs().powf(c) + x_prime.abs().powf(c)) / c;
    let mut br = vec![0.0];
    let min_panels = 32usize;
    let mut k = 1.0;
    loop {
        let qk = if phase_rate > 0.0 { (k * PI / phase_rate).powf(1.0 / c) } else { f64::INFINITY };
        let last = *br.last().unwrap();
        let step_cap = qmax / min_panels as f64;
        let next = qk.min(last + step_cap);
        if next >= qmax {
            br.push(qmax);
            break;
        }
        if next == qk {
            k += 1.0;
        }
        br.push(next);
        if br.len() > spec.max_panels {
            return Err(Error::Numeric(format!(
                "spectral integral needs more than {} phase panels (qmax = {qmax:.3e})",
                spec.max_panels
            )));
        }
    }
    let integrand = |q: f64| {
        let w = (-0.5 * t * q.abs().powf(p.nu + 2.0)).exp();
        let v = e_nu(p, q * x) * e_nu(p, q * x_prime).conj();
        [w * v.re, w * v.im]
    };
    let right = integrate_breaks(integrand, &br, spec)?;
    let neg: Vec<f64> = br.iter().rev().map(|q| -q).collect();
    let left = integrate_breaks(integrand, &neg, spec)?;
    let norm = 1.0 / (4.0 * p.u_nu * p.u_nu);
    Ok(ComplexValue::new(
        norm * (right.value[0] + left.value[0]),
        norm * (right.value[1] + left.value[1]),
    ))
}

/// Real part of [`phi_spectral_complex`].
pub fn phi_spectral(p: &NuParam, t: f64, x: f64, x_prime: f64, spec: &QuadSpec) -> Result<f64> {
    Ok(phi_spectral_complex(p, t, x, x_prime, spec)?.re)
}

/// Tabulated CDF of φ_dt(x_source, ·).
#[derive(Clone, Debug)]
pub struct KernelTable {
    pub p: NuParam,
    pub dt: f64,
    pub x_source: f64,
    pub grid: Vec<f64>,
    pub pdf: Vec<f64>,
    pub cdf: Vec<f64>,
}

/// Target grid for a kernel table: `resolution` points clustered at the
/// source by a sinh stretch in the r-coordinate, plus a uniform panel
/// across the origin where the r-map is sparse in x.
fn table_grid(p: &NuParam, dt: f64, x_source: f64, resolution: usize) -> Vec<f64> {
    let sd = p.c() * dt.sqrt();
    let sig = tail_scale(p, dt);
    let rs = to_r(p, x_source);
    let r_lo = (rs - 7.5 * sd).min(to_r(p, x_source - 8.0 * sig));
    let r_hi = (rs + 7.5 * sd).max(to_r(p, x_source + 8.0 * sig));
    let a = 2.0;
    let n = resolution;
    let mut g = Vec::with_capacity(n + n / 4 + 2);
    for i in 0..n {
        let s = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
        let u = (a * s).sinh() / a.sinh();
        let r = if u < 0.0 { rs + u * (rs - r_lo) } else { rs + u * (r_hi - rs) };
        g.push(from_r(p, r));
    }
    let m = n / 4;
    let w = sig;
    if r_lo < 0.0 && r_hi > 0.0 {
        for i in 0..=m {
            g.push(-w + 2.0 * w * i as f64 / m as f64);
        }
    }
    let (lo, hi) = (from_r(p, r_lo), from_r(p, r_hi));
    g.retain(|&v| v >= lo && v <= hi);
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    g
}

/// Builds the CDF by integrating φ_dt(x_source, ·) over each grid cell.
pub fn build_kernel_table(p: &NuParam, dt: f64, x_source: f64, resolution: usize) -> Result<KernelTable> {
    check_time(dt)?;
    if resolution < 64 {
        return Err(Error::Config(format!("kernel table resolution {resolution} is below 64")));
    }
    let grid = table_grid(p, dt, x_source, resolution);
    let mut pdf = Vec::with_capacity(grid.len());
    for &y in &grid {
        pdf.push(phi(p, dt, x_source, y)?);
    }
    let mut cdf = Vec::with_capacity(grid.len());
    cdf.push(0.0);
    let mut acc = 0.0;
    let mut f = |y: f64| [phi(p, dt, x_source, y).unwrap_or(f64::NAN)];
    for w in grid.windows(2) {
        let (v, _) = gk15(&mut f, w[0], w[1]);
        acc += v[0];
        cdf.push(acc);
    }
    if !acc.is_finite() || (acc - 1.0).abs() > 1e-6 {
        return Err(Error::Config(format!(
            "kernel table at x = {x_source}, dt = {dt} integrates to {acc}; increase resolution"
        )));
    }
    Ok(KernelTable { p: *p, dt, x_source, grid, pdf, cdf })
}

impl KernelTable {
    /// Total tabulated mass.
    pub fn mass(&self) -> f64 {
        *self.cdf.last().unwrap()
    }

    /// Table CDF at y, linear between grid points.
    pub fn cdf_at(&self, y: f64) -> f64 {
        let g = &self.grid;
        if y <= g[0] {
            return 0.0;
        }
        if y >= *g.last().unwrap() {
            return self.mass();
        }
        let i = g.partition_point(|&v| v <= y) - 1;
        let w = (y - g[i]) / (g[i + 1] - g[i]);
        self.cdf[i] + w * (self.cdf[i + 1] - self.cdf[i])
    }

    /// Inverse CDF at u ∈ [0, 1), rescaled onto the tabulated mass.
    pub fn quantile(&self, u: f64) -> f64 {
        let target = u * self.mass();
        let c = &self.cdf;
        let i = (c.partition_point(|&v| v <= target)).clamp(1, c.len() - 1) - 1;
        let span = c[i + 1] - c[i];
        let w = if span > 0.0 { ((target - c[i]) / span).clamp(0.0, 1.0) } else { 0.5 };
        self.grid[i] + w * (self.grid[i + 1] - self.grid[i])
    }
}

/// One draw from the tabulated law.
pub fn sample_from_table<R: Rng + ?Sized>(tbl: &KernelTable, rng: &mut R) -> f64 {
    tbl.quantile(rng.random::<f64>())
}
