//! Generalized plane waves of the singular generator
//! L u = ½ d/dx(|x|^{-ν} du/dx) and their normalization constants.

use crate::error::{Error, Result};
use crate::specfun::{self, gamma, j_asymptotic, normalized_series, DoubleDouble, Real, SpecFunAccuracy};
use std::ops::{Add, Mul, Sub};

/// Scaling order ν > 0 with the constants derived from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuParam {
    pub nu: f64,
    /// Bessel order (ν+1)/(ν+2).
    pub beta: f64,
    /// Characteristic exponent 1/(ν+2).
    pub char_exp: f64,
    /// Eigenfunction normalization Γ(1/(ν+2)) (ν+2)^{-(ν+1)/(ν+2)}.
    pub u_nu: f64,
    /// Kernel constant at the origin: φ_t(0,0) = 1 / (n_nu t^{1/(ν+2)}).
    pub n_nu: f64,
    gamma_one_minus_beta: f64,
    gamma_one_plus_beta: f64,
    im_coef: f64,
}

impl NuParam {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::Domain(format!("nu must be finite and > 0, got {nu}")));
        }
        let beta = (nu + 1.0) / (nu + 2.0);
        let char_exp = 1.0 / (nu + 2.0);
        let g_minus = gamma(char_exp)?;
        let g_plus = gamma(1.0 + beta)?;
        let u_nu = g_minus * (nu + 2.0).powf(-beta);
        let n_nu = 2f64.powf(beta) * g_minus * (nu + 2.0).powf(-nu / (nu + 2.0));
        let im_coef = g_minus * (nu + 2.0).powf(-2.0 * beta) / g_plus;
        Ok(NuParam {
            nu,
            beta,
            char_exp,
            u_nu,
            n_nu,
            gamma_one_minus_beta: g_minus,
            gamma_one_plus_beta: g_plus,
            im_coef,
        })
    }

    /// ν/2 + 1, the power in the Bessel argument |x|^{ν/2+1}/(ν/2+1).
    pub fn c(&self) -> f64 {
        0.5 * self.nu + 1.0
    }

    pub fn gamma_one_minus_beta(&self) -> f64 {
        self.gamma_one_minus_beta
    }

    pub fn gamma_one_plus_beta(&self) -> f64 {
        self.gamma_one_plus_beta
    }

    /// Bessel argument for e^{(ν)}(x).
    pub fn bessel_arg(&self, x: f64) -> f64 {
        x.abs().powf(self.c()) / self.c()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub const ONE: ComplexValue = ComplexValue { re: 1.0, im: 0.0 };
    pub const ZERO: ComplexValue = ComplexValue { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        ComplexValue { re, im }
    }

    pub fn conj(self) -> Self {
        ComplexValue { re: self.re, im: -self.im }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn scale(self, s: f64) -> Self {
        ComplexValue { re: self.re * s, im: self.im * s }
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Add for ComplexValue {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        ComplexValue { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for ComplexValue {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        ComplexValue { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for ComplexValue {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        ComplexValue { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

/// Which representation of the Bessel pair to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Series,
    Asymptotic,
}

/// Constants of `e_nu` in a given arithmetic.
#[derive(Clone, Copy, Debug)]
pub struct PlaneWave<R: Real> {
    beta: R,
    c: R,
    nu_plus_one: R,
    u: R,
    im_coef: R,
    switch: f64,
    max_terms: usize,
}

impl<R: Real> PlaneWave<R> {
    pub fn new(p: &NuParam) -> Self {
        let nu = R::from_f64(p.nu);
        let one = R::from_f64(1.0);
        let two = R::from_f64(2.0);
        let acc = SpecFunAccuracy::default();
        PlaneWave {
            beta: (nu + one) / (nu + two),
            c: nu / two + one,
            nu_plus_one: nu + one,
            u: R::from_f64(p.u_nu),
            im_coef: R::from_f64(p.im_coef),
            switch: acc.series_switch,
            max_terms: acc.max_series_terms,
        }
    }

    pub fn regime(&self, x: R) -> Regime {
        let ax = x.abs();
        if ax.to_f64() == 0.0 {
            return Regime::Series;
        }
        let z = ax.powr(self.c) / self.c;
        if z.to_f64() <= self.switch {
            Regime::Series
        } else {
            Regime::Asymptotic
        }
    }

    /// (Re, Im) of e^{(ν)}(x) in the requested regime.
    pub fn eval_in(&self, x: R, regime: Regime) -> (R, R) {
        let zero = R::from_f64(0.0);
        let ax = x.abs();
        if ax.to_f64() == 0.0 {
            return (R::from_f64(1.0), zero);
        }
        let sign = if x < zero { R::from_f64(-1.0) } else { R::from_f64(1.0) };
        let lnx = ax.ln();
        let z = (self.c * lnx).exp() / self.c;
        match regime {
            Regime::Series => {
                let w = -(z * z) / R::from_f64(4.0);
                let re = normalized_series(-self.beta, w, self.max_terms);
                let im = normalized_series(self.beta, w, self.max_terms);
                let pw = (self.nu_plus_one * lnx).exp();
                (re, sign * pw * self.im_coef * im)
            }
            Regime::Asymptotic => {
                let amp = self.u * (self.nu_plus_one * lnx / R::from_f64(2.0)).exp();
                let jm = j_asymptotic(-self.beta, z, self.max_terms);
                let jp = j_asymptotic(self.beta, z, self.max_terms);
                (amp * jm, sign * amp * jp)
            }
        }
    }

    pub fn eval(&self, x: R) -> (R, R) {
        self.eval_in(x, self.regime(x))
    }
}

/// e^{(ν)}(x), normalized so e^{(ν)}(0) = 1.
pub fn e_nu(p: &NuParam, x: f64) -> ComplexValue {
    let ax = x.abs();
    if ax == 0.0 {
        return ComplexValue::ONE;
    }
    let c = p.c();
    let z = ax.powf(c) / c;
    let sign = x.signum();
    if z <= SpecFunAccuracy::default().series_switch {
        let terms = SpecFunAccuracy::default().max_series_terms;
        let re = specfun::j_normalized_series(-p.beta, z, terms);
        let im = specfun::j_normalized_series(p.beta, z, terms);
        ComplexValue::new(re, sign * ax.powf(p.nu + 1.0) * p.im_coef * im)
    } else {
        let terms = SpecFunAccuracy::default().max_series_terms;
        let amp = p.u_nu * ax.powf(0.5 * (p.nu + 1.0));
        ComplexValue::new(amp * j_asymptotic(-p.beta, z, terms), sign * amp * j_asymptotic(p.beta, z, terms))
    }
}

/// e_q(x) = e^{(ν)}(q x).
pub fn e_q(p: &NuParam, q: f64, x: f64) -> ComplexValue {
    e_nu(p, q * x)
}

/// f_q(y) = e_q(sgn(y) |y|^{1/(ν+1)}), the plane wave in martingale coordinates.
pub fn f_q(p: &NuParam, q: f64, y: f64) -> ComplexValue {
    let x = y.signum() * y.abs().powf(1.0 / (p.nu + 1.0));
    e_q(p, q, x)
}

/// Finite-difference stencils for the flux-form generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stencil {
    /// Midpoint flux differences at spacing h, second order.
    ThreePoint,
    /// Richardson combination (4 L_h − L_{2h}) / 3 on x, x±h, x±2h, fourth order.
    FivePoint,
}

type Dd = DoubleDouble;

fn flux_operator(
    w: &PlaneWave<Dd>,
    nu: Dd,
    q: Dd,
    x: Dd,
    h: Dd,
    regime: Regime,
) -> (Dd, Dd) {
    let half = Dd::new(0.5);
    let weight = |y: Dd| (-(nu * y.abs().ln())).exp();
    let u = |y: Dd| w.eval_in(q * y, regime);
    let (u0r, u0i) = u(x);
    let (upr, upi) = u(x + h);
    let (umr, umi) = u(x - h);
    let ap = weight(x + h * half);
    let am = weight(x - h * half);
    let denom = Dd::new(2.0) * h * h;
    let re = (ap * (upr - u0r) - am * (u0r - umr)) / denom;
    let im = (ap * (upi - u0i) - am * (u0i - umi)) / denom;
    (re, im)
}

/// L e_q + ½|q|^{ν+2} e_q at x ≠ 0, evaluated in double-double.
///
/// All stencil points use the Bessel regime of the centre point, so the
/// series/asymptotic switch never falls inside a stencil.
pub fn generator_residual(p: &NuParam, q: f64, x: f64, h: f64, stencil: Stencil) -> ComplexValue {
    let w = PlaneWave::<Dd>::new(p);
    let nu = Dd::new(p.nu);
    let qd = Dd::new(q);
    let xd = Dd::new(x);
    let hd = Dd::new(h);
    let regime = w.regime(qd * xd);
    let (lr, li) = match stencil {
        Stencil::ThreePoint => flux_operator(&w, nu, qd, xd, hd, regime),
        Stencil::FivePoint => {
            let (ar, ai) = flux_operator(&w, nu, qd, xd, hd, regime);
            let (br, bi) = flux_operator(&w, nu, qd, xd, hd * Dd::new(2.0), regime);
            let three = Dd::new(3.0);
            ((Dd::new(4.0) * ar - br) / three, (Dd::new(4.0) * ai - bi) / three)
        }
    };
    let (ur, ui) = w.eval_in(qd * xd, regime);
    let lam = Dd::new(0.5) * (Dd::new(p.nu + 2.0) * qd.abs().ln()).exp();
    ComplexValue::new((lr + lam * ur).to_f64(), (li + lam * ui).to_f64())
}

/// sup over `xs` of |L e_q + ½|q|^{ν+2} e_q|.
pub fn eigen_residual_sup(p: &NuParam, q: f64, xs: &[f64], h: f64, stencil: Stencil) -> f64 {
    xs.iter().map(|&x| generator_residual(p, q, x, h, stencil).abs()).fold(0.0, f64::max)
}

/// (ν+1)²|y|^{ν/(ν+1)} f_q'' + |q|^{ν+2} f_q at y ≠ 0, in double-double.
pub fn backward_residual(p: &NuParam, q: f64, y: f64, h: f64, stencil: Stencil) -> ComplexValue {
    let w = PlaneWave::<Dd>::new(p);
    let nu1 = Dd::new(p.nu + 1.0);
    let qd = Dd::new(q);
    let yd = Dd::new(y);
    let hd = Dd::new(h);
    let to_x = |v: Dd| {
        let s = if v.hi < 0.0 { Dd::new(-1.0) } else { Dd::ONE };
        s * (v.abs().ln() / nu1).exp()
    };
    let regime = w.regime(qd * to_x(yd));
    let f = |v: Dd| w.eval_in(qd * to_x(v), regime);
    let second = |k: Dd| {
        let (a, ai) = f(yd + k);
        let (b, bi) = f(yd);
        let (c, ci) = f(yd - k);
        let d = k * k;
        ((a - Dd::new(2.0) * b + c) / d, (ai - Dd::new(2.0) * bi + ci) / d)
    };
    let (sr, si) = match stencil {
        Stencil::ThreePoint => second(hd),
        Stencil::FivePoint => {
            let (ar, ai) = second(hd);
            let (br, bi) = second(hd * Dd::new(2.0));
            let three = Dd::new(3.0);
            ((Dd::new(4.0) * ar - br) / three, (Dd::new(4.0) * ai - bi) / three)
        }
    };
    let qcoef = nu1 * nu1 * (Dd::new(p.nu) / nu1 * yd.abs().ln()).exp();
    let lam = (Dd::new(p.nu + 2.0) * qd.abs().ln()).exp();
    let (fr, fi) = f(yd);
    ComplexValue::new((qcoef * sr + lam * fr).to_f64(), (qcoef * si + lam * fi).to_f64())
}

/// Growth envelope for the n-th derivative of e_q:
/// 1 + |x|^{ν+1−n} near the origin, |x|^{νn/2+ν/4} for |x| ≥ 1.
pub fn derivative_envelope(p: &NuParam, n: u32, x: f64) -> f64 {
    let ax = x.abs();
    let n = n as f64;
    if ax <= 1.0 {
        1.0 + ax.powf(p.nu + 1.0 - n)
    } else {
        1.0 + ax.powf(0.5 * p.nu * n + 0.25 * p.nu)
    }
}
