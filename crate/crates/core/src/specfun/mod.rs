//! Real-order special functions: Γ, J_α and e^{-z} I_α for α in (-1, 1).
//!
//! Power series below `series_switch`, Hankel-type expansions above it.
//! The series and asymptotic kernels are generic over [`Real`] so the
//! same code runs in `f64` and in [`DoubleDouble`].

pub mod dd;

use crate::error::{Error, Result};
pub use dd::DoubleDouble;
use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed by the series and asymptotic kernels.
pub trait Real:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Relative size below which a series term is dropped.
    const EPS: f64;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn pi() -> Self;
    fn abs(self) -> Self {
        if self < Self::from_f64(0.0) {
            -self
        } else {
            self
        }
    }
    /// `self^e` for `self > 0`.
    fn powr(self, e: Self) -> Self {
        (e * self.ln()).exp()
    }
}

impl Real for f64 {
    const EPS: f64 = 1.0e-17;
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn pi() -> Self {
        PI
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powr(self, e: Self) -> Self {
        self.powf(e)
    }
}

impl Real for DoubleDouble {
    const EPS: f64 = 1.0e-33;
    fn from_f64(x: f64) -> Self {
        DoubleDouble::new(x)
    }
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }
    fn ln(self) -> Self {
        DoubleDouble::ln(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        DoubleDouble::sin_cos(self)
    }
    fn pi() -> Self {
        dd::DD_PI
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecFunAccuracy {
    pub rel_tol: f64,
    pub series_switch: f64,
    pub max_series_terms: usize,
}

impl Default for SpecFunAccuracy {
    fn default() -> Self {
        SpecFunAccuracy { rel_tol: 1.0e-12, series_switch: 15.0, max_series_terms: 400 }
    }
}

impl SpecFunAccuracy {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.series_switch > 0.0) || self.max_series_terms < 1 {
            return Err(Error::Config(format!("invalid accuracy settings {self:?}")));
        }
        Ok(())
    }
}

const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_092;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

const GAMMA_OVERFLOW: f64 = 171.624_376_956_302_7;

/// Γ(x) for real x off the poles.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite {x}")));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Domain(format!("gamma pole at {x}")));
    }
    if x > GAMMA_OVERFLOW {
        return Err(Error::Range(format!("gamma({x}) overflows")));
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma_lanczos(1.0 - x)));
    }
    Ok(gamma_lanczos(x))
}

fn gamma_lanczos(x: f64) -> f64 {
    let mut a = LANCZOS_C0;
    for (i, c) in LANCZOS.iter().enumerate() {
        a += c / (x + 1.0 + i as f64);
    }
    let t = x + LANCZOS_G;
    let p = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * a / x * p * (p * (-t).exp())
}

/// Σ_k w^k / (k! (α+1)_k), the power series of Γ(α+1)(z/2)^{-α} J_α(z)
/// (w = -z²/4) or of the same combination for I_α (w = z²/4).
pub fn normalized_series<R: Real>(alpha: R, w: R, max_terms: usize) -> R {
    let one = R::from_f64(1.0);
    let mut term = one;
    let mut sum = one;
    let wa = w.abs().to_f64();
    let mut k = 0.0;
    for _ in 0..max_terms {
        k += 1.0;
        let kr = R::from_f64(k);
        term = term * w / (kr * (kr + alpha));
        sum = sum + term;
        if k * k > wa && term.abs().to_f64() <= R::EPS * sum.abs().to_f64() {
            break;
        }
    }
    sum
}

/// Coefficient recursion shared by the J, I and K expansions:
/// a_k(α) = Π_{j≤k} (4α² − (2j−1)²) / (k! 8^k).
struct HankelTerms<R: Real> {
    mu: R,
    z: R,
    k: f64,
    term: R,
}

impl<R: Real> HankelTerms<R> {
    fn new(alpha: R, z: R) -> Self {
        HankelTerms { mu: R::from_f64(4.0) * alpha * alpha, z, k: 0.0, term: R::from_f64(1.0) }
    }
}

impl<R: Real> Iterator for HankelTerms<R> {
    type Item = R;
    /// Yields a_k / z^k for k = 1, 2, ...
    fn next(&mut self) -> Option<R> {
        self.k += 1.0;
        let odd = 2.0 * self.k - 1.0;
        self.term = self.term * (self.mu - R::from_f64(odd * odd)) / (R::from_f64(8.0 * self.k) * self.z);
        Some(self.term)
    }
}

/// Sum of `sign(k) a_k / z^k` truncated at the smallest term.
fn hankel_sum<R: Real>(alpha: R, z: R, signs: impl Fn(usize) -> f64, max_terms: usize) -> R {
    let mut sum = R::from_f64(1.0);
    let mut last = f64::INFINITY;
    for (k, t) in HankelTerms::new(alpha, z).enumerate().take(max_terms) {
        let mag = t.abs().to_f64();
        if mag > last {
            break;
        }
        sum = sum + R::from_f64(signs(k + 1)) * t;
        last = mag;
        if mag <= R::EPS * sum.abs().to_f64() {
            break;
        }
    }
    sum
}

/// J_α(z) from the large-argument expansion.
pub fn j_asymptotic<R: Real>(alpha: R, z: R, max_terms: usize) -> R {
    let mut p = R::from_f64(1.0);
    let mut q = R::from_f64(0.0);
    let mut last = f64::INFINITY;
    for (i, t) in HankelTerms::new(alpha, z).enumerate().take(max_terms) {
        let k = i + 1;
        let mag = t.abs().to_f64();
        if mag > last {
            break;
        }
        last = mag;
        match k % 4 {
            0 => p = p + t,
            1 => q = q + t,
            2 => p = p - t,
            _ => q = q - t,
        }
        if mag <= R::EPS {
            break;
        }
    }
    let quarter = R::from_f64(0.25);
    let half = R::from_f64(0.5);
    let omega = z - (alpha * half + quarter) * R::pi();
    let (s, c) = omega.sin_cos();
    (R::from_f64(2.0) / (R::pi() * z)).sqrt() * (p * c - q * s)
}

/// e^{-z} I_α(z) from the large-argument expansion, including the
/// exponentially small K-term that separates negative orders.
pub fn i_scaled_asymptotic(alpha: f64, z: f64, max_terms: usize) -> f64 {
    let s = hankel_sum(alpha, z, |k| if k % 2 == 0 { 1.0 } else { -1.0 }, max_terms);
    let main = s / (2.0 * PI * z).sqrt();
    if alpha < 0.0 {
        main + (2.0 / PI) * (-alpha * PI).sin() * (-2.0 * z).exp() * k_scaled_asymptotic(-alpha, z, max_terms)
    } else {
        main
    }
}

/// e^{z} K_α(z) from the large-argument expansion.
pub fn k_scaled_asymptotic(alpha: f64, z: f64, max_terms: usize) -> f64 {
    let s = hankel_sum(alpha, z, |_| 1.0, max_terms);
    (PI / (2.0 * z)).sqrt() * s
}

fn check_order(alpha: f64, z: f64) -> Result<()> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("Bessel order {alpha} outside (-1, 1)")));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("Bessel argument {z} must be finite and >= 0")));
    }
    Ok(())
}

/// Γ(α+1)(z/2)^{-α} J_α(z) by power series; double-double once
/// cancellation would cost more than a few digits.
pub fn j_normalized_series(alpha: f64, z: f64, max_terms: usize) -> f64 {
    let w = -0.25 * z * z;
    if z <= 6.0 {
        normalized_series(alpha, w, max_terms)
    } else {
        let wd = -(DoubleDouble::new(0.25) * DoubleDouble::new(z) * DoubleDouble::new(z));
        normalized_series(DoubleDouble::new(alpha), wd, max_terms).to_f64()
    }
}

/// J_α(z) by power series.
pub fn bessel_j_series(alpha: f64, z: f64, acc: &SpecFunAccuracy) -> Result<f64> {
    check_order(alpha, z)?;
    if z == 0.0 {
        return Ok(if alpha == 0.0 { 1.0 } else if alpha > 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok((0.5 * z).powf(alpha) / gamma(alpha + 1.0)? * j_normalized_series(alpha, z, acc.max_series_terms))
}

/// J_α(z) by the large-argument expansion.
pub fn bessel_j_asymptotic(alpha: f64, z: f64, acc: &SpecFunAccuracy) -> Result<f64> {
    check_order(alpha, z)?;
    if z == 0.0 {
        return Err(Error::Domain("asymptotic expansion at z = 0".into()));
    }
    Ok(j_asymptotic(alpha, z, acc.max_series_terms))
}

pub fn bessel_j_with(alpha: f64, z: f64, acc: &SpecFunAccuracy) -> Result<f64> {
    if z <= acc.series_switch {
        bessel_j_series(alpha, z, acc)
    } else {
        bessel_j_asymptotic(alpha, z, acc)
    }
}

/// Bessel function of the first kind, real order α in (-1, 1), z ≥ 0.
pub fn bessel_j(alpha: f64, z: f64) -> Result<f64> {
    bessel_j_with(alpha, z, &SpecFunAccuracy::default())
}

/// Γ(α+1)(z/2)^{-α} I_α(z) by power series (positive terms, no cancellation).
pub fn i_normalized_series(alpha: f64, z: f64, max_terms: usize) -> f64 {
    normalized_series(alpha, 0.25 * z * z, max_terms)
}

pub fn bessel_i_scaled_series(alpha: f64, z: f64, acc: &SpecFunAccuracy) -> Result<f64> {
    check_order(alpha, z)?;
    if z == 0.0 {
        return Ok(if alpha == 0.0 { 1.0 } else if alpha > 0.0 { 0.0 } else { f64::INFINITY });
    }
    let log_pref = alpha * (0.5 * z).ln() - z;
    Ok(log_pref.exp() / gamma(alpha + 1.0)? * i_normalized_series(alpha, z, acc.max_series_terms))
}

pub fn bessel_i_scaled_asymptotic(alpha: f64, z: f64, acc: &SpecFunAccuracy) -> Result<f64> {
    check_order(alpha, z)?;
    if z == 0.0 {
        return Err(Error::Domain("asymptotic expansion at z = 0".into()));
    }
    Ok(i_scaled_asymptotic(alpha, z, acc.max_series_terms))
}

pub fn bessel_i_scaled_with(alpha: f64, z: f64, acc: &SpecFunAccuracy) -> Result<f64> {
    if z <= acc.series_switch {
        bessel_i_scaled_series(alpha, z, acc)
    } else {
        bessel_i_scaled_asymptotic(alpha, z, acc)
    }
}

/// e^{-z} I_α(z), real order α in (-1, 1), z ≥ 0.
pub fn bessel_i_scaled(alpha: f64, z: f64) -> Result<f64> {
    bessel_i_scaled_with(alpha, z, &SpecFunAccuracy::default())
}
