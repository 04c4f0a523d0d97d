//! Double-double arithmetic (about 32 significant digits).
//!
//! Only what the finite-difference eigen checks need: field operations,
//! `sqrt`, `exp`, `ln`, `sin`, `cos`.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub const DD_PI: DoubleDouble = DoubleDouble { hi: 3.141592653589793, lo: 1.2246467991473532e-16 };
pub const DD_LN2: DoubleDouble = DoubleDouble { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn mul_pow2(self, s: f64) -> Self {
        DoubleDouble { hi: self.hi * s, lo: self.lo * s }
    }

    fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::ZERO;
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = DoubleDouble::new(self.hi * x);
        let corr = (self - ax.sqr()).hi * (x * 0.5);
        ax + DoubleDouble::new(corr)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DoubleDouble::ZERO;
        }
        let k = (self.hi / DD_LN2.hi).round();
        let r = (self - DD_LN2 * DoubleDouble::new(k)).mul_pow2(1.0 / 1024.0);
        // expm1 on the reduced argument, then undo the 2^-10 scaling by squaring
        let mut term = r;
        let mut s = r;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = term * r / DoubleDouble::new(n);
            s = s + term;
            if term.hi.abs() < 1e-34 || n > 40.0 {
                break;
            }
        }
        for _ in 0..10 {
            s = s.mul_pow2(2.0) + s.sqr();
        }
        let e = s + DoubleDouble::ONE;
        let scale = 2f64.powi(k as i32);
        e.mul_pow2(scale)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::new(f64::NAN);
        }
        let y = DoubleDouble::new(self.hi.ln());
        // one Newton step doubles the 53-bit seed
        y + self * (-y).exp() - DoubleDouble::ONE
    }

    /// sin and cos together after reduction to |r| <= pi/4.
    pub fn sin_cos(self) -> (Self, Self) {
        let two_pi = DD_PI.mul_pow2(2.0);
        let half_pi = DD_PI.mul_pow2(0.5);
        let k = (self.hi / two_pi.hi).round();
        let r = self - two_pi * DoubleDouble::new(k);
        let j = (r.hi / half_pi.hi).round();
        let r = r - half_pi * DoubleDouble::new(j);
        let r2 = r.sqr();
        let mut s = r;
        let mut c = DoubleDouble::ONE;
        let mut ts = r;
        let mut tc = DoubleDouble::ONE;
        let mut n = 0.0;
        loop {
            n += 2.0;
            tc = -(tc * r2) / DoubleDouble::new(n * (n - 1.0));
            ts = -(ts * r2) / DoubleDouble::new(n * (n + 1.0));
            c = c + tc;
            s = s + ts;
            if tc.hi.abs() < 1e-34 && ts.hi.abs() < 1e-34 {
                break;
            }
        }
        match (j as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::new(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * DoubleDouble::new(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * DoubleDouble::new(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::new(q3)
    }
}
