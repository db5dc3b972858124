//! Exact decimal conversion for double-double values.
//!
//! Both components are dyadic rationals, so the pair is expanded exactly
//! into a big integer times a power of ten and rounded once (half-even).

use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};

use super::DoubleDouble;
use crate::error::Error;

/// Splits a finite binary64 value into `(mantissa, exponent)` with
/// `x = mantissa * 2^exponent` exactly.
fn decode(x: f64) -> (i64, i32) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & 0x000f_ffff_ffff_ffff;
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | 0x0010_0000_0000_0000, exp_bits - 1075)
    };
    (sign * mant as i64, exp)
}

fn pow_big(base: u32, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Formats `x` as `d.ddd…e±x` with `digits` significant digits.
pub fn format_scientific(x: DoubleDouble, digits: usize) -> String {
    let digits = digits.max(1);
    let hi = x.hi();
    if hi.is_nan() {
        return "NaN".to_string();
    }
    if hi.is_infinite() {
        return if hi > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if hi == 0.0 {
        let mut s = String::from(if hi.is_sign_negative() { "-0" } else { "0" });
        if digits > 1 {
            s.push('.');
            s.extend(std::iter::repeat_n('0', digits - 1));
        }
        s.push_str("e0");
        return s;
    }

    let (mh, eh) = decode(hi);
    let (ml, el) = decode(x.lo());
    let e = if x.lo() == 0.0 { eh } else { eh.min(el) };
    let mut n = BigInt::from(mh) << (eh - e) as usize;
    if x.lo() != 0.0 {
        n += BigInt::from(ml) << (el - e) as usize;
    }
    let negative = n.sign() == Sign::Minus;
    let n = if negative { -n } else { n };
    let (d, dexp) = if e >= 0 {
        (n << e as usize, 0i64)
    } else {
        (n * pow_big(5, (-e) as u32), e as i64)
    };

    let s = d.to_str_radix(10);
    let len = s.len();
    let (mut mant, mut sci_exp) = (s.clone(), len as i64 - 1 + dexp);
    if len > digits {
        let (keep, rest) = s.split_at(digits);
        let first = rest.as_bytes()[0];
        let tail_nonzero = rest.as_bytes()[1..].iter().any(|&c| c != b'0');
        let last_odd = (keep.as_bytes()[digits - 1] - b'0') % 2 == 1;
        let round_up = first > b'5' || (first == b'5' && (tail_nonzero || last_odd));
        mant = keep.to_string();
        if round_up {
            let mut bytes = mant.into_bytes();
            let mut i = bytes.len();
            loop {
                if i == 0 {
                    bytes.insert(0, b'1');
                    bytes.pop();
                    sci_exp += 1;
                    break;
                }
                i -= 1;
                if bytes[i] == b'9' {
                    bytes[i] = b'0';
                } else {
                    bytes[i] += 1;
                    break;
                }
            }
            mant = String::from_utf8(bytes).expect("ascii digits");
        }
    } else {
        mant.extend(std::iter::repeat_n('0', digits - len));
    }

    let mut out = String::with_capacity(digits + 8);
    if negative {
        out.push('-');
    }
    out.push_str(&mant[..1]);
    if digits > 1 {
        out.push('.');
        out.push_str(&mant[1..]);
    }
    out.push('e');
    out.push_str(&sci_exp.to_string());
    out
}

/// Nearest binary64 to `num / den` (den > 0), up to one extra rounding
/// in the last bit.
fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 66;
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let mut v = q.to_f64().unwrap_or(f64::NAN);
    let mut s = shift;
    while s > 1000 {
        v *= 2f64.powi(-1000);
        s -= 1000;
    }
    while s < -1000 {
        v *= 2f64.powi(1000);
        s += 1000;
    }
    v * 2f64.powi(-s as i32)
}

impl FromStr for DoubleDouble {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let t = text.trim();
        let bad = || Error::Parse {
            line: 0,
            message: format!("invalid decimal number {t:?}"),
        };
        let (body, exp_part) = match t.find(['e', 'E']) {
            Some(pos) => (&t[..pos], Some(&t[pos + 1..])),
            None => (t, None),
        };
        let mut exp10: i64 = match exp_part {
            Some(e) => e.parse().map_err(|_| bad())?,
            None => 0,
        };
        let (negative, body) = match body.as_bytes().first() {
            Some(b'-') => (true, &body[1..]),
            Some(b'+') => (false, &body[1..]),
            _ => (false, body),
        };
        let mut digits = String::with_capacity(body.len());
        let mut seen_dot = false;
        for ch in body.chars() {
            match ch {
                '0'..='9' => {
                    digits.push(ch);
                    if seen_dot {
                        exp10 -= 1;
                    }
                }
                '.' if !seen_dot => seen_dot = true,
                _ => return Err(bad()),
            }
        }
        if digits.is_empty() {
            return Err(bad());
        }

        let hi: f64 = t.parse().map_err(|_| bad())?;
        if !hi.is_finite() || hi == 0.0 {
            return Ok(DoubleDouble::from_f64(hi));
        }

        let mut d = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
        if negative {
            d = -d;
        }
        let (mh, eh) = decode(hi);
        let mh = BigInt::from(mh);
        let p10 = pow_big(10, exp10.unsigned_abs() as u32);
        let p2 = BigInt::from(1) << eh.unsigned_abs() as usize;
        // value - hi = num / den, all exact
        let (num, den) = match (exp10 >= 0, eh >= 0) {
            (true, true) => (d * &p10 - mh * &p2, BigInt::from(1)),
            (true, false) => (d * &p10 * &p2 - mh, p2),
            (false, true) => (d - mh * &p2 * &p10, p10),
            (false, false) => (d * &p2 - mh * &p10, p10 * p2),
        };
        let lo = ratio_to_f64(&num, &den);
        Ok(DoubleDouble::new(hi, lo))
    }
}

/// Serialized as a 34-significant-digit decimal string, which round-trips.
impl serde::Serialize for DoubleDouble {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_scientific(*self, 34))
    }
}

impl<'de> serde::Deserialize<'de> for DoubleDouble {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = DoubleDouble;
            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("a decimal string or number")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<DoubleDouble, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<DoubleDouble, E> {
                Ok(DoubleDouble::from_f64(v))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<DoubleDouble, E> {
                Ok(DoubleDouble::from_f64(v as f64))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<DoubleDouble, E> {
                Ok(DoubleDouble::from_f64(v as f64))
            }
        }
        d.deserialize_any(Visitor)
    }
}
