//! Diffusivity and jump-rate models for the pre-limit processes.

use crate::eigen::NuParam;
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Diffusion coefficient D of the generator ½ d/dx D(x) d/dx.
#[derive(Clone)]
pub enum Diffusivity {
    /// D(x) = 1/(ε + |x|^ν).
    Regularized { eps: f64 },
    /// Any positive D with D(x) = |x|^{-ν} + O(|x|^{-ν-1}) at infinity.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Diffusivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diffusivity::Regularized { eps } => write!(f, "Regularized {{ eps: {eps} }}"),
            Diffusivity::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Diffusion with generator ½ d/dx D(x) d/dx.
#[derive(Clone, Debug)]
pub struct SdeModel {
    pub p: NuParam,
    pub d: Diffusivity,
}

impl SdeModel {
    /// D(x) = 1/(1 + |x|^ν).
    pub fn default_model(p: NuParam) -> Self {
        SdeModel { p, d: Diffusivity::Regularized { eps: 1.0 } }
    }

    /// D(x) = 1/(ε + |x|^ν), the ε-regularized limit generator.
    pub fn regularized(p: NuParam, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Config(format!("regularization must be > 0, got {eps}")));
        }
        Ok(SdeModel { p, d: Diffusivity::Regularized { eps } })
    }

    pub fn custom(p: NuParam, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SdeModel { p, d: Diffusivity::Custom(Arc::new(d)) }
    }

    /// Regularization of the rescaled coefficient D^{(N)} when it is again of
    /// the form 1/(ε + |x|^ν): ε N^{-ν/(ν+2)}.
    pub fn epsilon(&self, n: f64) -> Option<f64> {
        match self.d {
            Diffusivity::Regularized { eps } => Some(eps * n.powf(-self.p.nu * self.p.char_exp)),
            Diffusivity::Custom(_) => None,
        }
    }

    pub fn d(&self, x: f64) -> f64 {
        match &self.d {
            Diffusivity::Regularized { eps } => 1.0 / (eps + x.abs().powf(self.p.nu)),
            Diffusivity::Custom(f) => f(x),
        }
    }

    /// D^{(N)}(x) = N^{ν/(ν+2)} D(N^{1/(ν+2)} x), the coefficient of the
    /// rescaled process N^{-1/(ν+2)} X_{Nt}.
    pub fn d_scaled(&self, n: f64, x: f64) -> f64 {
        match &self.d {
            Diffusivity::Regularized { .. } => {
                let e = self.epsilon(n).unwrap();
                1.0 / (e + x.abs().powf(self.p.nu))
            }
            Diffusivity::Custom(f) => {
                let a = self.p.char_exp;
                n.powf(self.p.nu * a) * f(n.powf(a) * x)
            }
        }
    }

    /// Spatial scale below which D^{(N)} departs from |x|^{-ν}.
    pub fn core_scale(&self, n: f64) -> f64 {
        match self.epsilon(n) {
            Some(e) => e.powf(1.0 / self.p.nu),
            None => n.powf(-self.p.char_exp),
        }
    }
}

/// Jump rates R_n^± of a nearest-neighbour walk with R_n^+ = R_{n+1}^-.
#[derive(Clone)]
pub struct RateModel {
    pub nu: f64,
    bond: Arc<dyn Fn(i64) -> f64 + Send + Sync>,
    /// Form of the O(|n|^{-ν-1}) correction to 1/(2|n|^ν).
    pub correction: String,
}

impl fmt::Debug for RateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RateModel").field("nu", &self.nu).field("correction", &self.correction).finish()
    }
}

impl RateModel {
    /// Bond rates c_n = 1/(|n|^ν + |n+1|^ν), so c_0 = c_{-1} = 1.
    pub fn default_model(nu: f64) -> Self {
        RateModel {
            nu,
            bond: Arc::new(move |n: i64| 1.0 / ((n as f64).abs().powf(nu) + ((n + 1) as f64).abs().powf(nu))),
            correction: "1/(|n|^nu + |n+1|^nu) - 1/(2|n|^nu) = -nu sgn(n)/(4|n|^(nu+1)) + O(|n|^(-nu-2))".into(),
        }
    }

    /// Rates from a bond function: R_n^+ = bond(n), R_n^- = bond(n-1).
    pub fn from_bond(nu: f64, bond: impl Fn(i64) -> f64 + Send + Sync + 'static, correction: &str) -> Self {
        RateModel { nu, bond: Arc::new(bond), correction: correction.into() }
    }

    pub fn rate_plus(&self, n: i64) -> f64 {
        (self.bond)(n)
    }

    pub fn rate_minus(&self, n: i64) -> f64 {
        (self.bond)(n - 1)
    }

    /// sup over 2 ≤ |n| ≤ n_max of |R_n^+ − 1/(2|n|^ν)| |n|^{ν+1}.
    pub fn asymptotic_constant(&self, n_max: i64) -> f64 {
        let mut c = 0.0f64;
        for m in 2..=n_max {
            for n in [m, -m] {
                let a = (n as f64).abs();
                let dev = (self.rate_plus(n) - 0.5 / a.powf(self.nu)).abs();
                c = c.max(dev * a.powf(self.nu + 1.0));
            }
        }
        c
    }

    /// Checks positivity of the rates on |n| ≤ n_max.
    pub fn validate(&self, n_max: i64) -> Result<()> {
        for n in -n_max..=n_max {
            let r = self.rate_plus(n);
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Model(format!("rate R_{n}^+ = {r} is not positive")));
            }
        }
        Ok(())
    }
}
