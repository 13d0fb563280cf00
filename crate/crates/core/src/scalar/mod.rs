//! Scalar arithmetic modes.
//!
//! Every quadrature routine in this crate is generic over [`Scalar`], so the
//! same code runs in hardware doubles, in double-double arithmetic
//! (~31 significant digits) or in binary arbitrary precision.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

mod dd;
mod mp;

pub use dd::DoubleDouble;
pub use mp::{default_mp_digits, set_default_mp_digits, Mp, MIN_MP_DIGITS};

/// A real number type the quadrature machinery can compute in.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Short label of the precision mode ("double", "dd", "mp:40").
    fn mode_name() -> String;

    fn from_f64(x: f64) -> Self;

    fn from_i64(n: i64) -> Self;

    /// Nearest representable value to an exact rational.
    fn from_ratio(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    fn sqrt(&self) -> Self;

    fn exp(&self) -> Self;

    /// Natural logarithm. Callers guarantee a positive argument.
    fn ln(&self) -> Self;

    /// Unit roundoff of the mode (spacing of representable numbers near 1).
    fn unit_roundoff() -> Self;

    fn is_finite(&self) -> bool;

    /// Decimal rendering carrying every significant digit of the mode.
    fn to_decimal_string(&self) -> String;

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn one() -> Self {
        Self::from_i64(1)
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Integer power by repeated squaring; negative exponents take a reciprocal.
    fn powi(&self, k: i64) -> Self {
        let mut base = self.clone();
        let mut e = k.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        if k < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn mode_name() -> String {
        "double".to_string()
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn unit_roundoff() -> Self {
        f64::EPSILON
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn to_decimal_string(&self) -> String {
        // Shortest representation that round-trips.
        format!("{:e}", self)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

/// Parses a decimal literal (`123`, `-0.6`, `1e-8`, `.5E+3`) into an exact rational.
pub fn parse_decimal_ratio(text: &str) -> Option<BigRational> {
    let s = text.trim();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent.checked_sub(frac_part.len() as i64)?;
    if scale.unsigned_abs() > 100_000 {
        return None;
    }
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, scale.unsigned_abs() as usize))
    };
    Some(r)
}

/// Parses a decimal literal directly into the requested scalar mode.
pub fn parse_decimal<T: Scalar>(text: &str) -> Option<T> {
    parse_decimal_ratio(text).map(|r| T::from_ratio(&r))
}

/// Renders an exact rational in scientific notation with `digits` significant digits.
pub(crate) fn format_ratio_scientific(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0e0".to_string();
    }
    let digits = digits.max(1);
    let sign = if r.is_negative() { "-" } else { "" };
    let mag = r.abs();
    let ten = BigInt::from(10);

    // Estimate floor(log10 |r|) from bit lengths, then correct.
    let bits = mag.numer().bits() as i64 - mag.denom().bits() as i64;
    let mut exp10 = ((bits as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let pow10 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), e as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
        }
    };
    loop {
        let scaled = &mag / pow10(exp10);
        if scaled >= BigRational::from_integer(ten.clone()) {
            exp10 += 1;
        } else if scaled < BigRational::one() {
            exp10 -= 1;
        } else {
            break;
        }
    }
    let scaled = &mag / pow10(exp10) * pow10(digits as i64 - 1);
    // Round half to even on the last kept digit.
    let (q, rem): (BigInt, BigInt) = scaled.numer().div_rem(scaled.denom());
    let twice: BigInt = rem * 2;
    let mut q = match twice.cmp(scaled.denom()) {
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Equal => {
            if q.is_odd() {
                q + 1
            } else {
                q
            }
        }
    };
    if q == num_traits::pow(ten.clone(), digits) {
        q = num_traits::pow(ten.clone(), digits - 1);
        exp10 += 1;
    }
    let text = q.to_string();
    let (lead, rest) = text.split_at(1);
    if rest.is_empty() {
        format!("{sign}{lead}e{exp10}")
    } else {
        format!("{sign}{lead}.{rest}e{exp10}")
    }
}
