//! Double-double arithmetic: an unevaluated sum `hi + lo` of two doubles with
//! `|lo| <= ulp(hi) / 2`, giving roughly 106 bits of significand.
//!
//! Products use Dekker splitting rather than fused multiply-add so results are
//! bit-identical on every target.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use super::{format_ratio_scientific, Scalar};

/// Significant decimal digits printed for a double-double.
const DECIMAL_DIGITS: usize = 32;

// ln 2 split into a double-double pair.
const LN2: DoubleDouble = DoubleDouble { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

const EXP_TERMS: usize = 11;

/// `1/1!, 1/2!, ..., 1/11!`, correctly rounded.
fn inverse_factorials() -> &'static [DoubleDouble; EXP_TERMS] {
    static TABLE: OnceLock<[DoubleDouble; EXP_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut factorial = BigInt::from(1);
        std::array::from_fn(|k| {
            factorial *= k + 1;
            DoubleDouble::from_ratio(&BigRational::new(BigInt::from(1), factorial.clone()))
        })
    })
}

#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

// requires |a| >= |b|
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    const THRESHOLD: f64 = 6.696_928_794_914_17e299;
    if a.abs() > THRESHOLD {
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
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    /// Builds a normalized value from two doubles whose exact sum is represented.
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, mut p2) = two_prod(self.hi, b);
        p2 += self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Self { hi, lo }
    }

    // exact when the factor is a power of two
    fn scale_pow2(self, e: i64) -> Self {
        Self { hi: ldexp(self.hi, e), lo: ldexp(self.lo, e) }
    }

    fn sqr(self) -> Self {
        self * self
    }

    /// Exact value of the pair as a rational.
    pub fn to_ratio(&self) -> Option<BigRational> {
        let hi = BigRational::from_float(self.hi)?;
        let lo = BigRational::from_float(self.lo)?;
        Some(hi + lo)
    }

    fn from_bigint(n: &BigInt) -> Self {
        let hi = n.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Self { hi, lo: 0.0 };
        }
        let rem = n - BigInt::from_f64(hi).expect("finite double is an integer here");
        let lo = rem.to_f64().unwrap_or(0.0);
        Self::from_parts(hi, lo)
    }

    fn exp_impl(self) -> Self {
        if self.hi > 709.8 {
            return Self { hi: f64::INFINITY, lo: 0.0 };
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::ONE;
        }
        // x = k ln2 + r, then exp(r) = (1 + expm1(r / 512))^512.
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).scale_pow2(-9);

        // |r| < 7e-4, so terms past r^11/11! are below the working precision.
        let inv = inverse_factorials();
        let mut sum = inv[EXP_TERMS - 1];
        for c in inv[..EXP_TERMS - 1].iter().rev() {
            sum = sum * r + *c;
        }
        let mut sum = sum * r;
        for _ in 0..9 {
            sum = sum.scale_pow2(1) + sum.sqr();
        }
        (sum + Self::ONE).scale_pow2(k as i64)
    }

    fn ln_impl(self) -> Self {
        if self.hi == 1.0 && self.lo == 0.0 {
            return Self::ZERO;
        }
        if !(self.hi > 0.0) {
            return Self { hi: f64::NAN, lo: f64::NAN };
        }
        if self.hi.is_infinite() {
            return self;
        }
        // One Newton step on exp(y) = x doubles the 53-bit seed.
        let y = Self::from(self.hi.ln());
        y + self * (-y).exp_impl() - Self::ONE
    }

    fn sqrt_impl(self) -> Self {
        if self.hi == 0.0 {
            return Self::ZERO;
        }
        if self.hi < 0.0 {
            return Self { hi: f64::NAN, lo: f64::NAN };
        }
        let y = Self::from(self.hi.sqrt());
        y + (self - y.sqr()) / y.scale_pow2(1)
    }
}

impl From<f64> for DoubleDouble {
    fn from(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        if !s1.is_finite() {
            return Self { hi: s1, lo: 0.0 };
        }
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Self { hi, lo }
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
        let (p1, mut p2) = two_prod(self.hi, b.hi);
        if !p1.is_finite() {
            return Self { hi: p1, lo: 0.0 };
        }
        p2 += self.hi * b.lo + self.lo * b.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;

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
        Self { hi: q1, lo: q2 } + Self::from(q3)
    }
}

impl Scalar for DoubleDouble {
    fn mode_name() -> String {
        "dd".to_string()
    }

    fn from_f64(x: f64) -> Self {
        Self::from(x)
    }

    fn from_i64(n: i64) -> Self {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Self::from_parts(hi, lo)
    }

    fn from_ratio(r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::ZERO;
        }
        // Integer quotient carrying ~120 significant bits, then an exact rescale.
        let numer = r.numer().abs();
        let denom = r.denom();
        let shift = 120 + denom.bits() as i64 - numer.bits() as i64;
        let q = if shift >= 0 { (numer << shift as usize) / denom } else { (numer >> (-shift) as usize) / denom };
        let v = Self::from_bigint(&q).scale_pow2(-shift);
        if r.is_negative() {
            -v
        } else {
            v
        }
    }

    fn to_f64(&self) -> f64 {
        self.hi
    }

    fn sqrt(&self) -> Self {
        self.sqrt_impl()
    }

    fn exp(&self) -> Self {
        self.exp_impl()
    }

    fn ln(&self) -> Self {
        self.ln_impl()
    }

    fn unit_roundoff() -> Self {
        Self::from(2f64.powi(-104))
    }

    fn is_finite(&self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    fn to_decimal_string(&self) -> String {
        match self.to_ratio() {
            Some(r) => format_ratio_scientific(&r, DECIMAL_DIGITS),
            None => format!("{}", self.hi),
        }
    }

    fn abs(&self) -> Self {
        if self.hi < 0.0 {
            -*self
        } else {
            *self
        }
    }
}
