use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use super::{Complex, DoubleDouble};

/// Field element a dense kernel can operate on: a real in one of the two
/// working precisions, or a complex number over one.
pub trait Scalar:
    Copy
    + Debug
    + Default
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    type Real: Real;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(r: Self::Real) -> Self;
    fn from_f64(x: f64) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn conj(self) -> Self;
    /// Modulus, computed without intermediate overflow.
    fn modulus(self) -> Self::Real;
    /// Squared modulus.
    fn modulus_sqr(self) -> Self::Real;
    fn scale(self, r: Self::Real) -> Self;
    fn is_finite(self) -> bool;
    fn is_zero(self) -> bool {
        self == Self::zero()
    }
    /// Unit-modulus phase `self / |self|`, or one for zero.
    fn phase(self) -> Self {
        let m = self.modulus();
        if m == Self::Real::zero() {
            Self::one()
        } else {
            self.scale(Self::Real::one() / m)
        }
    }
}

/// Ordered real scalar: binary64 or double-double.
pub trait Real: Scalar<Real = Self> + PartialOrd + Display {
    /// Unit roundoff of the format.
    fn epsilon() -> Self;
    /// Significant decimal digits used when printing.
    const DIGITS: usize;
    /// Short tag used in reports ("f64" or "extended").
    const NAME: &'static str;

    fn to_f64(self) -> f64;
    /// Exact widening to double-double.
    fn to_extended(self) -> DoubleDouble;
    /// Rounds a double-double value into this precision.
    fn from_extended(x: DoubleDouble) -> Self;
    fn from_usize(n: usize) -> Self {
        <Self as Scalar>::from_f64(n as f64)
    }
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn hypot(self, other: Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big == Self::zero() {
            return Self::zero();
        }
        let r = small / big;
        big * (Self::one() + r * r).sqrt()
    }
    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
    fn signum_or_one(self) -> Self {
        if self < Self::zero() {
            -Self::one()
        } else {
            Self::one()
        }
    }
    /// Scientific notation with `DIGITS` significant digits.
    fn to_sci_string(self) -> String;
}

impl Scalar for f64 {
    type Real = f64;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_real(r: f64) -> Self {
        r
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn modulus_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn scale(self, r: f64) -> Self {
        self * r
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Real for f64 {
    const DIGITS: usize = 17;
    const NAME: &'static str = "f64";

    #[inline]
    fn epsilon() -> Self {
        f64::EPSILON
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn to_extended(self) -> DoubleDouble {
        DoubleDouble::from_f64(self)
    }
    #[inline]
    fn from_extended(x: DoubleDouble) -> Self {
        x.to_f64()
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    #[inline]
    fn hypot(self, other: Self) -> Self {
        f64::hypot(self, other)
    }
    fn to_sci_string(self) -> String {
        format!("{:.16e}", self)
    }
}

impl Scalar for DoubleDouble {
    type Real = DoubleDouble;

    #[inline]
    fn zero() -> Self {
        DoubleDouble::ZERO
    }
    #[inline]
    fn one() -> Self {
        DoubleDouble::ONE
    }
    #[inline]
    fn from_real(r: Self) -> Self {
        r
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    #[inline]
    fn re(self) -> Self {
        self
    }
    #[inline]
    fn im(self) -> Self {
        DoubleDouble::ZERO
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn modulus(self) -> Self {
        DoubleDouble::abs(self)
    }
    #[inline]
    fn modulus_sqr(self) -> Self {
        self.square()
    }
    #[inline]
    fn scale(self, r: Self) -> Self {
        self * r
    }
    #[inline]
    fn is_finite(self) -> bool {
        DoubleDouble::is_finite(self)
    }
}

impl Real for DoubleDouble {
    const DIGITS: usize = 34;
    const NAME: &'static str = "extended";

    #[inline]
    fn epsilon() -> Self {
        DoubleDouble::EPSILON
    }
    #[inline]
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    #[inline]
    fn to_extended(self) -> DoubleDouble {
        self
    }
    #[inline]
    fn from_extended(x: DoubleDouble) -> Self {
        x
    }
    #[inline]
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        self.sqrt_unchecked()
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        DoubleDouble::powi(self, n)
    }
    fn to_sci_string(self) -> String {
        super::decimal::format_scientific(self, 34)
    }
}

impl<T: Real> Scalar for Complex<T> {
    type Real = T;

    #[inline]
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    #[inline]
    fn one() -> Self {
        Complex::new(T::one(), T::zero())
    }
    #[inline]
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        Complex::new(T::from_f64(x), T::zero())
    }
    #[inline]
    fn re(self) -> T {
        self.re
    }
    #[inline]
    fn im(self) -> T {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    #[inline]
    fn modulus(self) -> T {
        self.re.hypot(self.im)
    }
    #[inline]
    fn modulus_sqr(self) -> T {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn scale(self, r: T) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}
