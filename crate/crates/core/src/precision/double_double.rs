//! Double-double arithmetic: an unevaluated sum `hi + lo` of two binary64
//! values carrying roughly 31 significant decimal digits.
//!
//! The kernels follow the classic error-free transformations (Knuth's
//! two-sum, Dekker's split/two-product). No fused multiply-add is required,
//! so results are bit-identical across targets.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Extended-precision real scalar stored as a normalized pair `hi + lo`
/// with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

/// Alias used throughout the crate for the extended working precision.
pub type ExtendedScalar = DoubleDouble;

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
const SPLIT_THRESHOLD: f64 = 6.696_928_794_914_17e299; // 2^996

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    if a.abs() > SPLIT_THRESHOLD {
        let scaled = a * 3.725_290_298_461_914e-9; // 2^-28
        let t = SPLITTER * scaled;
        let hi = t - (t - scaled);
        let lo = scaled - hi;
        (hi * 268_435_456.0, lo * 268_435_456.0)
    } else {
        let t = SPLITTER * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    if !p.is_finite() {
        return (p, 0.0);
    }
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    /// Unit of the last place of the double-double format, `2^-104`.
    pub const EPSILON: Self = Self {
        hi: 4.930_380_657_631_324e-32,
        lo: 0.0,
    };

    /// Builds a value from a pair, renormalizing so that `hi` carries the
    /// rounded sum.
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self::finite_or(hi, lo)
    }

    #[inline]
    fn finite_or(hi: f64, lo: f64) -> Self {
        if hi.is_finite() {
            Self { hi, lo }
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn is_nan(self) -> bool {
        self.hi.is_nan() || self.lo.is_nan()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn square(self) -> Self {
        let (p, e) = two_prod(self.hi, self.hi);
        let e = e + 2.0 * self.hi * self.lo + self.lo * self.lo;
        let (hi, lo) = quick_two_sum(p, e);
        Self::finite_or(hi, lo)
    }

    /// Multiplication by a binary64 value, slightly cheaper than the full
    /// double-double product.
    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Self::finite_or(hi, lo)
    }

    /// Division that reports an exact zero divisor instead of producing
    /// an infinity.
    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs.hi == 0.0 {
            return Err(Error::Domain("division by zero"));
        }
        Ok(self / rhs)
    }

    /// Square root refined by one Newton step from the binary64 seed.
    pub fn checked_sqrt(self) -> Result<Self> {
        if self.hi < 0.0 {
            return Err(Error::Domain("square root of a negative number"));
        }
        Ok(self.sqrt_unchecked())
    }

    /// Square root; negative input yields NaN.
    #[inline]
    pub fn sqrt_unchecked(self) -> Self {
        if self.hi == 0.0 {
            return Self::ZERO;
        }
        if self.hi < 0.0 || !self.hi.is_finite() {
            return Self::from_f64(self.hi.sqrt());
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let residual = (self - Self { hi: p, lo: e }).hi;
        let (hi, lo) = two_sum(s, residual / (2.0 * s));
        Self { hi, lo }
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        if n < 0 {
            Self::ONE / acc
        } else {
            acc
        }
    }

    /// Multiply by an exact power of two.
    #[inline]
    pub fn ldexp(self, exp: i32) -> Self {
        let scale = 2f64.powi(exp);
        Self {
            hi: self.hi * scale,
            lo: self.lo * scale,
        }
    }
}

impl From<f64> for DoubleDouble {
    #[inline]
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        if !s.is_finite() {
            return Self { hi: s, lo: 0.0 };
        }
        let (t, f) = two_sum(self.lo, b.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self::finite_or(hi, lo)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Self { hi: q1, lo: 0.0 };
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::from_f64(q3)
    }
}

macro_rules! assign_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for DoubleDouble {
            #[inline]
            fn $method(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}

assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl PartialOrd for DoubleDouble {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(34).clamp(1, 34);
        f.write_str(&super::decimal::format_scientific(*self, digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::from_f64(x)
    }

    #[test]
    fn add_keeps_tiny_tail() {
        let tiny = 2f64.powi(-60);
        let s = dd(1.0) + dd(tiny);
        assert_eq!(s.hi(), 1.0);
        assert_eq!(s.lo(), tiny);
    }

    #[test]
    fn multiplicative_identity() {
        let x = dd(1.0) / dd(7.0) + dd(3.5);
        assert_eq!(x * DoubleDouble::ONE, x);
    }

    #[test]
    fn third_times_three() {
        let third = dd(1.0) / dd(3.0);
        let back = third * dd(3.0);
        assert!((back - DoubleDouble::ONE).abs().to_f64() <= 1e-30);
    }

    #[test]
    fn sqrt_cases() {
        assert_eq!(dd(0.0).checked_sqrt().unwrap(), DoubleDouble::ZERO);
        assert_eq!(dd(4.0).checked_sqrt().unwrap(), dd(2.0));
        let r = dd(2.0).checked_sqrt().unwrap();
        assert!((r.square() - dd(2.0)).abs().to_f64() <= 1e-30);
        assert!(dd(-1.0).checked_sqrt().is_err());
    }

    #[test]
    fn division_by_zero_is_domain_error() {
        assert!(matches!(
            dd(1.0).checked_div(DoubleDouble::ZERO),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn normalized_after_ops() {
        let a = dd(1.0) / dd(3.0);
        let b = dd(2.0).sqrt_unchecked();
        for v in [a + b, a - b, a * b, a / b, a.square()] {
            assert_eq!(v.hi() + v.lo(), v.hi());
        }
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = dd(1.0) + dd(1e-9);
        let mut p = DoubleDouble::ONE;
        for _ in 0..13 {
            p *= x;
        }
        assert!(((x.powi(13) - p) / p).abs().to_f64() < 1e-30);
        assert!(((x.powi(-2) * x.square()) - DoubleDouble::ONE).abs().to_f64() < 1e-30);
    }

    #[test]
    fn ordering_uses_tail() {
        let a = dd(1.0) + dd(1e-20);
        assert!(a > DoubleDouble::ONE);
        assert!(-a < DoubleDouble::ONE);
    }
}
