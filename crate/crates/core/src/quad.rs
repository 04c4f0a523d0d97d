//! Adaptive Gauss–Kronrod quadrature and fixed Gauss–Legendre rules.
//!
//! Integrands return `[f64; K]` so real and imaginary parts (or several
//! moments) share one set of panels.

use crate::error::{Error, Result};
use std::collections::BinaryHeap;

/// Tolerances and budget for adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { abs_tol: 1e-12, rel_tol: 1e-10, max_panels: 20_000 }
    }
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_panels: usize) -> Self {
        QuadSpec { abs_tol, rel_tol, max_panels }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<const K: usize> {
    pub value: [f64; K],
    pub error: f64,
    pub panels: usize,
}

// Kronrod 15-point nodes (non-negative half) and weights; the Gauss
// 7-point rule uses the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639,
    0.949_107_912_342_758_525,
    0.864_864_423_359_769_073,
    0.741_531_185_599_394_440,
    0.586_087_235_467_691_130,
    0.405_845_151_377_397_167,
    0.207_784_955_007_898_468,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_553,
    0.104_790_010_322_250_184,
    0.140_653_259_715_525_919,
    0.169_004_726_639_267_903,
    0.190_350_578_064_785_410,
    0.204_432_940_075_298_892,
    0.209_482_141_084_727_828,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693,
    0.279_705_391_489_276_668,
    0.381_830_050_505_118_945,
    0.417_959_183_673_469_388,
];

/// One G7/K15 panel: Kronrod estimate and |K15 − G7| per component.
pub fn gk15<const K: usize, F: FnMut(f64) -> [f64; K]>(f: &mut F, a: f64, b: f64) -> ([f64; K], f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kr = [0.0; K];
    let mut ga = [0.0; K];
    for k in 0..K {
        kr[k] = fc[k] * WGK[7];
        ga[k] = fc[k] * WG[3];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for k in 0..K {
            let s = f1[k] + f2[k];
            kr[k] += WGK[j] * s;
            if j % 2 == 1 {
                ga[k] += WG[j / 2] * s;
            }
        }
    }
    let mut err = 0.0f64;
    for k in 0..K {
        kr[k] *= h;
        ga[k] *= h;
        err = err.max((kr[k] - ga[k]).abs());
    }
    (kr, err)
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    err: f64,
}

impl<const K: usize> PartialEq for Panel<K> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<const K: usize> Eq for Panel<K> {}
impl<const K: usize> PartialOrd for Panel<K> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<const K: usize> Ord for Panel<K> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive integration over the panels given by `breaks`
/// (at least two increasing points). The worst panel is bisected until
/// the summed error estimate meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_breaks<const K: usize, F: FnMut(f64) -> [f64; K]>(
    mut f: F,
    breaks: &[f64],
    spec: &QuadSpec,
) -> Result<QuadResult<K>> {
    if breaks.len() < 2 {
        return Err(Error::Config("quadrature needs at least one panel".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut total = [0.0; K];
    let mut err = 0.0;
    for w in breaks.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Config(format!("quadrature breaks not increasing: {} {}", w[0], w[1])));
        }
        let (value, e) = gk15(&mut f, w[0], w[1]);
        for k in 0..K {
            total[k] += value[k];
        }
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value, err: e });
    }
    let mut since_resum = 0usize;
    loop {
        // running sums drift; refresh them now and then and before accepting
        let resum = |heap: &BinaryHeap<Panel<K>>| {
            let mut t = [0.0; K];
            let mut e = 0.0;
            for p in heap.iter() {
                for k in 0..K {
                    t[k] += p.value[k];
                }
                e += p.err;
            }
            (t, e)
        };
        if since_resum >= 1024 {
            (total, err) = resum(&heap);
            since_resum = 0;
        }
        let mag = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let panels = heap.len();
        if !total.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric("non-finite integrand value in quadrature".into()));
        }
        if err <= spec.abs_tol.max(spec.rel_tol * mag) {
            let (t, e) = resum(&heap);
            let mag = t.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if e <= spec.abs_tol.max(spec.rel_tol * mag) {
                return Ok(QuadResult { value: t, error: e, panels });
            }
            (total, err) = (t, e);
        }
        if panels >= spec.max_panels {
            return Err(Error::Numeric(format!(
                "quadrature did not converge: error estimate {err:.3e} after {panels} panels (|I| = {mag:.3e})"
            )));
        }
        let worst = heap.pop().expect("non-empty heap");
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            return Err(Error::Numeric(format!("quadrature panel collapsed at {m}")));
        }
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        for k in 0..K {
            total[k] += v1[k] + v2[k] - worst.value[k];
        }
        err += e1 + e2 - worst.err;
        since_resum += 1;
        heap.push(Panel { a: worst.a, b: m, value: v1, err: e1 });
        heap.push(Panel { a: m, b: worst.b, value: v2, err: e2 });
    }
}

/// Scalar convenience wrapper over a single interval.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<QuadResult<1>> {
    integrate_breaks(|x| [f(x)], &[a, b], spec)
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
