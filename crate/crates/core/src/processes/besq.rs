//! Exact transitions of the squared Bessel process ds = 2√s dω + δ dt.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

/// One exact BESQ^δ transition over time h from s0:
/// K ~ Poisson(s0/(2h)), then Gamma(K + δ/2, scale 2h).
pub fn besq_step<R: Rng + ?Sized>(delta: f64, s0: f64, h: f64, rng: &mut R) -> f64 {
    let lam = s0 / (2.0 * h);
    let k = if lam > 0.0 { Poisson::new(lam).expect("finite positive Poisson mean").sample(rng) } else { 0.0 };
    Gamma::new(k + 0.5 * delta, 2.0 * h).expect("positive gamma shape").sample(rng)
}

/// BESQ^δ values on a time grid (times[0] = 0) starting from s0.
pub fn besq_chain<R: Rng + ?Sized>(delta: f64, s0: f64, times: &[f64], rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut s = s0;
    out.push(s);
    for w in times.windows(2) {
        s = besq_step(delta, s, w[1] - w[0], rng);
        out.push(s);
    }
    out
}

/// Dimension 2/(ν+2) of the BESQ process (4/(ν+2)²)|x_t|^{ν+2}.
pub fn besq_dimension(nu: f64) -> f64 {
    2.0 / (nu + 2.0)
}

/// s = (4/(ν+2)²)|x|^{ν+2}.
pub fn besq_coordinate(nu: f64, x: f64) -> f64 {
    4.0 / ((nu + 2.0) * (nu + 2.0)) * x.abs().powf(nu + 2.0)
}
