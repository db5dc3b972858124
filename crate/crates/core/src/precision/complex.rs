use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use super::{DoubleDouble, Real, Scalar};
use crate::error::{Error, Result};

/// Complex number over a real working precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Complex<T> {
    pub re: T,
    pub im: T,
}

pub type ExtendedComplex = Complex<DoubleDouble>;
pub type Complex64 = Complex<f64>;

impl<T> Complex<T> {
    #[inline]
    pub const fn new(re: T, im: T) -> Self {
        Self { re, im }
    }
}

impl<T: Real> Complex<T> {
    #[inline]
    pub fn i() -> Self {
        Self::new(T::zero(), T::one())
    }

    /// Modulus via scaled hypot.
    #[inline]
    pub fn abs(self) -> T {
        self.modulus()
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs.re == T::zero() && rhs.im == T::zero() {
            return Err(Error::Domain("complex division by zero"));
        }
        Ok(self / rhs)
    }

    /// Converts the components to another real precision.
    pub fn cast<U: Real>(self) -> Complex<U> {
        Complex::new(
            <U as Scalar>::from_f64(self.re.to_f64()),
            <U as Scalar>::from_f64(self.im.to_f64()),
        )
    }

    pub fn to_extended(self) -> ExtendedComplex {
        Complex::new(self.re.to_extended(), self.im.to_extended())
    }

    pub fn from_extended(z: ExtendedComplex) -> Self {
        Complex::new(T::from_extended(z.re), T::from_extended(z.im))
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: u32) -> Self {
        let mut base = self;
        let mut e = n;
        let mut acc = <Self as Scalar>::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }
}

impl<T: Real> Neg for Complex<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl<T: Real> Add for Complex<T> {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        Self::new(self.re + b.re, self.im + b.im)
    }
}

impl<T: Real> Sub for Complex<T> {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        Self::new(self.re - b.re, self.im - b.im)
    }
}

impl<T: Real> Mul for Complex<T> {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        Self::new(
            self.re * b.re - self.im * b.im,
            self.re * b.im + self.im * b.re,
        )
    }
}

impl<T: Real> Div for Complex<T> {
    type Output = Self;
    /// Smith's algorithm.
    #[inline]
    fn div(self, b: Self) -> Self {
        if b.re.abs() >= b.im.abs() {
            let r = b.im / b.re;
            let den = b.re + b.im * r;
            Self::new(
                (self.re + self.im * r) / den,
                (self.im - self.re * r) / den,
            )
        } else {
            let r = b.re / b.im;
            let den = b.re * r + b.im;
            Self::new(
                (self.re * r + self.im) / den,
                (self.im * r - self.re) / den,
            )
        }
    }
}

macro_rules! assign_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<T: Real> $trait for Complex<T> {
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

impl<T: Real> Sum for Complex<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(<Self as Scalar>::zero(), |acc, x| acc + x)
    }
}

impl<T: Real> fmt::Display for Complex<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im < T::zero() { '-' } else { '+' };
        write!(
            f,
            "{}{}{}i",
            self.re.to_sci_string(),
            sign,
            self.im.abs().to_sci_string()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = ExtendedComplex;

    fn c(re: f64, im: f64) -> C {
        Complex::new(DoubleDouble::from(re), DoubleDouble::from(im))
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(C::i() * C::i(), c(-1.0, 0.0));
    }

    #[test]
    fn abs_of_three_four() {
        assert_eq!(c(3.0, 4.0).abs(), DoubleDouble::from(5.0));
    }

    #[test]
    fn abs_does_not_overflow() {
        let z = Complex::new(1e149_f64, 1e149);
        assert!((z.abs() / 1e149 - 2f64.sqrt()).abs() < 1e-15);
        let big = Complex::new(1e300_f64, 1e300);
        assert!(big.abs().is_finite());
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = c(0.3, -1.7);
        let b = c(2.5, 0.125);
        let q = (a * b) / b;
        assert!((q - a).abs().to_f64() < 1e-30);
        assert!(a.checked_div(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn conj_times_self_is_modulus_squared() {
        let z = c(1.0 / 3.0, 2.0 / 7.0);
        let p = z.conj() * z;
        let m2 = z.modulus_sqr();
        assert!(((p.re - m2) / m2).abs().to_f64() < 1e-30);
        assert_eq!(p.im.to_f64().abs(), 0.0);
    }
}
