//! Binary arbitrary precision backed by `dashu-float`.
//!
//! Each value carries its own precision; binary operations keep the larger of
//! the two. Values created from literals take the process-wide default, set
//! with [`set_default_mp_digits`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_rational::BigRational;

use super::Scalar;

type Float = FBig<HalfEven, 2>;

/// Smallest accepted decimal digit count for arbitrary precision.
pub const MIN_MP_DIGITS: usize = 16;

static DEFAULT_DIGITS: AtomicUsize = AtomicUsize::new(40);

/// Sets the decimal digit count used for new [`Mp`] values. Values below
/// [`MIN_MP_DIGITS`] are raised to it.
pub fn set_default_mp_digits(digits: usize) {
    DEFAULT_DIGITS.store(digits.max(MIN_MP_DIGITS), AtomicOrdering::Relaxed);
}

pub fn default_mp_digits() -> usize {
    DEFAULT_DIGITS.load(AtomicOrdering::Relaxed)
}

fn default_bits() -> usize {
    digits_to_bits(default_mp_digits())
}

// Guard bits keep the last requested decimal digit meaningful.
fn digits_to_bits(digits: usize) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 8
}

#[derive(Clone)]
pub struct Mp(Float);

impl Mp {
    fn with_default_precision(value: Float) -> Self {
        Mp(value.with_precision(default_bits()).value())
    }

    fn from_ibig(n: IBig) -> Self {
        Self::with_default_precision(Float::from(n))
    }

    /// Exact shortcuts such as `exp(0)` come back with unlimited precision,
    /// which later transcendental calls reject.
    fn limited(&self, value: Float) -> Self {
        if value.precision() == 0 && !value.repr().is_infinite() {
            Mp(value.with_precision(self.precision_bits().max(default_bits())).value())
        } else {
            Mp(value)
        }
    }

    /// Working precision of this value in bits.
    pub fn precision_bits(&self) -> usize {
        self.0.precision()
    }
}

fn to_ibig(n: &num_bigint::BigInt) -> IBig {
    n.to_string().parse().expect("decimal integer text")
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp({})", self.to_decimal_string())
    }
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl PartialEq for Mp {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Mp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Neg for Mp {
    type Output = Self;

    fn neg(self) -> Self {
        Mp(-self.0)
    }
}

fn sign(x: &Float) -> i8 {
    match x.partial_cmp(&Float::ZERO) {
        Some(Ordering::Less) => -1,
        _ => 1,
    }
}

fn infinity(sign: i8) -> Mp {
    Mp(if sign < 0 { Float::NEG_INFINITY } else { Float::INFINITY })
}

// dashu panics on arithmetic with an infinite operand; any such result is
// reported as an infinity so evaluation can flag it as non-finite.
macro_rules! forward_binop {
    ($trait:ident, $method:ident, $sign:expr) => {
        impl $trait for Mp {
            type Output = Self;

            fn $method(self, rhs: Self) -> Self {
                if self.0.repr().is_infinite() || rhs.0.repr().is_infinite() {
                    let s: fn(&Float, &Float) -> i8 = $sign;
                    return infinity(s(&self.0, &rhs.0));
                }
                Mp($trait::$method(self.0, rhs.0))
            }
        }
    };
}

fn dominant(a: &Float, b: &Float) -> i8 {
    if a.repr().is_infinite() {
        sign(a)
    } else {
        sign(b)
    }
}

forward_binop!(Add, add, dominant);
forward_binop!(Sub, sub, |a, b| if a.repr().is_infinite() { sign(a) } else { -sign(b) });
fn product_sign(a: &Float, b: &Float) -> i8 {
    sign(a) * sign(b)
}

forward_binop!(Mul, mul, product_sign);
forward_binop!(Div, div, product_sign);

impl Scalar for Mp {
    fn mode_name() -> String {
        format!("mp:{}", default_mp_digits())
    }

    fn from_f64(x: f64) -> Self {
        Self::with_default_precision(Float::try_from(x).expect("finite double"))
    }

    fn from_i64(n: i64) -> Self {
        Self::from_ibig(IBig::from(n))
    }

    fn from_ratio(r: &BigRational) -> Self {
        let numer = Self::from_ibig(to_ibig(r.numer()));
        let denom = Self::from_ibig(to_ibig(r.denom()));
        numer / denom
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    fn sqrt(&self) -> Self {
        if self.0.repr().is_infinite() {
            return self.clone();
        }
        self.limited(self.0.sqrt())
    }

    fn exp(&self) -> Self {
        if self.0.repr().is_infinite() {
            return if sign(&self.0) < 0 { Mp::from_i64(0) } else { self.clone() };
        }
        self.limited(self.0.exp())
    }

    fn ln(&self) -> Self {
        if self.0.repr().is_infinite() {
            return self.clone();
        }
        self.limited(self.0.ln())
    }

    fn unit_roundoff() -> Self {
        let one = Self::from_i64(1);
        let bits = one.precision_bits();
        Mp(Float::from(IBig::ONE).with_precision(bits).value() / Float::from(IBig::ONE << bits))
    }

    fn is_finite(&self) -> bool {
        !self.0.repr().is_infinite()
    }

    fn to_decimal_string(&self) -> String {
        if self.0.repr().is_infinite() {
            return if sign(&self.0) < 0 { "-inf".into() } else { "inf".into() };
        }
        let digits = default_mp_digits();
        let decimal = self.0.to_decimal().value().with_precision(digits).value();
        format!("{:e}", decimal)
    }
}
