//! Martingale coordinates: Y, Y_N, W_N, Q_N, A_N for diffusions and
//! Ŷ, Q̂, Â for nearest-neighbour walks.

use crate::eigen::NuParam;
use crate::error::{Error, Result};
use crate::processes::models::{RateModel, SdeModel};
use crate::quad::{integrate, QuadSpec};

/// Y(x) = sgn(x)|x|^{ν+1}.
pub fn y_limit(p: &NuParam, x: f64) -> f64 {
    x.signum() * x.abs().powf(p.nu + 1.0)
}

/// Inverse of [`y_limit`].
pub fn w_limit(p: &NuParam, y: f64) -> f64 {
    y.signum() * y.abs().powf(1.0 / (p.nu + 1.0))
}

/// Q(y) = (ν+1)²|y|^{ν/(ν+1)}.
pub fn q_limit(p: &NuParam, y: f64) -> f64 {
    (p.nu + 1.0).powi(2) * y.abs().powf(p.nu / (p.nu + 1.0))
}

/// Exponent (ν+2)/(ν+1) of the submartingale |M|^{(ν+2)/(ν+1)}.
pub fn sub_exponent(p: &NuParam) -> f64 {
    (p.nu + 2.0) / (p.nu + 1.0)
}

/// Coordinates of the rescaled diffusion N^{-1/(ν+2)} X_{Nt}.
#[derive(Clone, Debug)]
pub struct ContinuumMap {
    pub model: SdeModel,
    pub n: f64,
    eps: Option<f64>,
    x_core: f64,
    y_core: f64,
    quad: QuadSpec,
}

impl ContinuumMap {
    pub fn new(model: SdeModel, n: f64) -> Result<Self> {
        if !(n >= 1.0) || !n.is_finite() {
            return Err(Error::Config(format!("scale N must be finite and >= 1, got {n}")));
        }
        let eps = model.epsilon(n);
        let x_core = model.core_scale(n);
        let mut m = ContinuumMap { model, n, eps, x_core, y_core: 0.0, quad: QuadSpec::new(1e-14, 1e-13, 4000) };
        m.y_core = m.y_n(x_core)?.abs();
        Ok(m)
    }

    pub fn p(&self) -> &NuParam {
        &self.model.p
    }

    pub fn d_n(&self, x: f64) -> f64 {
        match self.eps {
            Some(e) => 1.0 / (e + self.pow_nu(x.abs())),
            None => self.model.d_scaled(self.n, x),
        }
    }

    /// Scale |x| = x_core below which D^{(N)} is flattened.
    pub fn x_core(&self) -> f64 {
        self.x_core
    }

    /// |Y_N(x_core)|.
    pub fn y_core(&self) -> f64 {
        self.y_core
    }

    /// Y_N(x) = (ν+1) ∫_0^x da / D^{(N)}(a).
    pub fn y_n(&self, x: f64) -> Result<f64> {
        let nu = self.p().nu;
        if let Some(e) = self.eps {
            return Ok(x.signum() * x.abs().powf(nu + 1.0) + (nu + 1.0) * e * x);
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        let r = integrate(|a| 1.0 / self.d_n(a), 0.0, x.abs(), &self.quad)?;
        let v = x.signum() * (nu + 1.0) * r.value[0];
        if !v.is_finite() {
            return Err(Error::Model(format!("Y_N({x}) is not finite")));
        }
        Ok(v)
    }

    /// dY_N/dx = (ν+1)/D^{(N)}(x).
    pub fn dy_dx(&self, x: f64) -> f64 {
        (self.p().nu + 1.0) / self.d_n(x)
    }

    /// W_N(y) = Y_N^{-1}(y): bisection to a bracket, then Newton polish.
    pub fn w_n(&self, y: f64) -> Result<f64> {
        if y == 0.0 {
            return Ok(0.0);
        }
        let ay = y.abs();
        let mut hi = match self.eps {
            Some(e) => ay.powf(1.0 / (self.p().nu + 1.0)).min(ay / ((self.p().nu + 1.0) * e)),
            None => {
                let mut h = self.x_core.max(1e-300);
                while self.y_n(h)? < ay {
                    h *= 2.0;
                    if !h.is_finite() {
                        return Err(Error::Model(format!("Y_N does not reach {y}")));
                    }
                }
                h
            }
        };
        let mut lo = 0.0;
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.y_n(x)? - ay;
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let step = f / self.dy_dx(x);
            let mut nx = x - step;
            if !(nx > lo && nx < hi) {
                nx = 0.5 * (lo + hi);
            }
            if (nx - x).abs() <= 1e-15 * nx.abs() || hi - lo <= 1e-15 * hi {
                x = nx;
                break;
            }
            x = nx;
        }
        Ok(y.signum() * x)
    }

    /// Newton solve of Y_N(x) = y started from a nearby `guess`. Y_N is
    /// convex on each half-line, so the iterates stay on the correct side
    /// of 0; falls back to [`Self::w_n`] if they do not settle. Only for
    /// closed-form Y_N.
    pub fn w_n_from(&self, y: f64, guess: f64) -> f64 {
        let e = match self.eps {
            Some(e) => e,
            None => return self.w_n(y).unwrap_or(f64::NAN),
        };
        if y == 0.0 {
            return 0.0;
        }
        let k = self.p().nu + 1.0;
        let ay = y.abs();
        let mut x = if guess.signum() == y.signum() && guess != 0.0 {
            guess.abs()
        } else {
            ay.powf(1.0 / k).min(ay / (k * e))
        };
        for _ in 0..40 {
            let xn = self.pow_nu(x);
            let f = xn * x + k * e * x - ay;
            let nx = x - f / (k * (xn + e));
            if !(nx > 0.0) || !nx.is_finite() {
                break;
            }
            if (nx - x).abs() <= 1e-14 * nx {
                return y.signum() * nx;
            }
            x = nx;
        }
        self.w_n(y).unwrap_or(f64::NAN)
    }

    /// Q_N(y) = (ν+1)²/D^{(N)}(W_N(y)).
    pub fn q_n(&self, y: f64) -> Result<f64> {
        Ok(self.q_n_at_x(self.w_n(y)?))
    }

    pub fn q_n_at_x(&self, x: f64) -> f64 {
        let k = self.p().nu + 1.0;
        match self.eps {
            Some(e) => k * k * (e + self.pow_nu(x.abs())),
            None => k * k / self.d_n(x),
        }
    }

    /// a^ν, with integer powers taken exactly.
    #[inline]
    fn pow_nu(&self, a: f64) -> f64 {
        let nu = self.p().nu;
        if nu == nu.trunc() && nu <= 8.0 {
            a.powi(nu as i32)
        } else {
            a.powf(nu)
        }
    }

    /// A_N(y) = 2|y|^{-ν/(ν+1)} / ((ν+2) D^{(N)}(W_N(y))), the compensator
    /// density of (4/(ν+2)²)|M|^{(ν+2)/(ν+1)}.
    pub fn a_n(&self, y: f64) -> Result<f64> {
        let nu = self.p().nu;
        let x = self.w_n(y)?;
        Ok(2.0 * y.abs().powf(-nu / (nu + 1.0)) / ((nu + 2.0) * self.d_n(x)))
    }

    /// Fails if Y_N is not strictly increasing on the sample points.
    pub fn check_monotone(&self, xs: &[f64]) -> Result<()> {
        let mut v: Vec<f64> = xs.to_vec();
        v.sort_by(f64::total_cmp);
        let mut prev = f64::NEG_INFINITY;
        for &x in &v {
            let y = self.y_n(x)?;
            if y <= prev {
                return Err(Error::Model(format!("Y_N is not increasing near x = {x}")));
            }
            prev = y;
        }
        Ok(())
    }
}

/// Martingale coordinates of a nearest-neighbour walk with prefix sums
/// cached on |n| ≤ n_max.
#[derive(Clone, Debug)]
pub struct DiscreteMap {
    pub rates: RateModel,
    pub p: NuParam,
    pub n: f64,
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl DiscreteMap {
    /// Ŷ(n) = σ(ν+1) Σ_{m=1}^{|n|} 1/(2 R^{-σ}_{σm}), σ = sgn(n).
    ///
    /// Each increment is the inverse rate of the bond crossed, so L_R Ŷ = 0,
    /// and the factor ½ matches R ~ 1/(2|n|^ν) so that Ŷ(n) ~ Y(n).
    pub fn new(rates: RateModel, n: f64, n_max: usize) -> Result<Self> {
        let p = NuParam::new(rates.nu)?;
        if !(n >= 1.0) || !n.is_finite() {
            return Err(Error::Config(format!("scale N must be finite and >= 1, got {n}")));
        }
        rates.validate(n_max as i64 + 1)?;
        let k = p.nu + 1.0;
        let mut pos = vec![0.0; n_max + 1];
        let mut neg = vec![0.0; n_max + 1];
        for m in 1..=n_max {
            pos[m] = pos[m - 1] + k / (2.0 * rates.rate_minus(m as i64));
            neg[m] = neg[m - 1] + k / (2.0 * rates.rate_plus(-(m as i64)));
        }
        Ok(DiscreteMap { rates, p, n, pos, neg })
    }

    pub fn n_max(&self) -> i64 {
        self.pos.len() as i64 - 1
    }

    pub fn y_hat(&self, n: i64) -> f64 {
        let m = n.unsigned_abs() as usize;
        let k = self.p.nu + 1.0;
        if m < self.pos.len() {
            return if n >= 0 { self.pos[m] } else { -self.neg[m] };
        }
        let last = self.pos.len() - 1;
        if n >= 0 {
            let mut s = self.pos[last];
            for j in last + 1..=m {
                s += k / (2.0 * self.rates.rate_minus(j as i64));
            }
            s
        } else {
            let mut s = self.neg[last];
            for j in last + 1..=m {
                s += k / (2.0 * self.rates.rate_plus(-(j as i64)));
            }
            -s
        }
    }

    /// Predictable quadratic-variation rate of Ŷ(X_t):
    /// R_n^+ (Ŷ(n+1)−Ŷ(n))² + R_n^- (Ŷ(n−1)−Ŷ(n))².
    pub fn q_hat(&self, n: i64) -> f64 {
        let y = self.y_hat(n);
        let up = self.y_hat(n + 1) - y;
        let dn = self.y_hat(n - 1) - y;
        self.rates.rate_plus(n) * up * up + self.rates.rate_minus(n) * dn * dn
    }

    /// Compensator rate of |Ŷ(X_t)|^{(ν+2)/(ν+1)}.
    pub fn a_hat(&self, n: i64) -> f64 {
        let e = sub_exponent(&self.p);
        let f = |m: i64| self.y_hat(m).abs().powf(e);
        let c = f(n);
        self.rates.rate_minus(n) * (f(n - 1) - c) + self.rates.rate_plus(n) * (f(n + 1) - c)
    }

    fn space_scale(&self) -> f64 {
        self.n.powf(self.p.char_exp)
    }

    /// Lattice index of a rescaled position x ∈ N^{-1/(ν+2)} ℤ.
    pub fn site(&self, x: f64) -> i64 {
        (x * self.space_scale()).round() as i64
    }

    /// Ŵ: the site whose Ŷ-image is closest to `yhat`.
    pub fn w_hat(&self, yhat: f64) -> i64 {
        let (arr, sign) = if yhat >= 0.0 { (&self.pos, 1i64) } else { (&self.neg, -1i64) };
        let a = yhat.abs();
        if a > *arr.last().unwrap() {
            let mut m = self.n_max();
            while self.y_hat(sign * (m + 1)).abs() <= a {
                m += 1;
            }
            let lo = self.y_hat(sign * m).abs();
            let hi = self.y_hat(sign * (m + 1)).abs();
            return sign * if a - lo <= hi - a { m } else { m + 1 };
        }
        let i = arr.partition_point(|&v| v < a);
        if i == 0 {
            return 0;
        }
        let m = if arr[i] - a <= a - arr[i - 1] { i } else { i - 1 };
        sign * m as i64
    }

    /// Y_N(x) = N^{-(ν+1)/(ν+2)} Ŷ(N^{1/(ν+2)} x).
    pub fn y_n(&self, x: f64) -> f64 {
        self.n.powf(-(self.p.nu + 1.0) * self.p.char_exp) * self.y_hat(self.site(x))
    }

    fn y_scale(&self) -> f64 {
        self.n.powf((self.p.nu + 1.0) * self.p.char_exp)
    }

    /// Q_N(y) = N^{-ν/(ν+2)} Q̂(Ŵ(N^{(ν+1)/(ν+2)} y)).
    pub fn q_n(&self, y: f64) -> f64 {
        self.n.powf(-self.p.nu * self.p.char_exp) * self.q_hat(self.w_hat(y * self.y_scale()))
    }

    /// A_N(y) = Â(Ŵ(N^{(ν+1)/(ν+2)} y)).
    pub fn a_n(&self, y: f64) -> f64 {
        self.a_hat(self.w_hat(y * self.y_scale()))
    }
}

/// Either family of martingale coordinates.
#[derive(Clone, Debug)]
pub enum CoordinateMap {
    Continuum(ContinuumMap),
    Discrete(DiscreteMap),
}

impl CoordinateMap {
    pub fn p(&self) -> &NuParam {
        match self {
            CoordinateMap::Continuum(m) => m.p(),
            CoordinateMap::Discrete(m) => &m.p,
        }
    }

    pub fn y_n(&self, x: f64) -> Result<f64> {
        match self {
            CoordinateMap::Continuum(m) => m.y_n(x),
            CoordinateMap::Discrete(m) => Ok(m.y_n(x)),
        }
    }

    pub fn q_n(&self, y: f64) -> Result<f64> {
        match self {
            CoordinateMap::Continuum(m) => m.q_n(y),
            CoordinateMap::Discrete(m) => Ok(m.q_n(y)),
        }
    }
}
