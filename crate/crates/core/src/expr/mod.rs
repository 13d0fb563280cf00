//! Integrand expressions: parsing, evaluation and symbolic differentiation.
//!
//! Grammar of the text form (whitespace is insignificant):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 'x' | '(' expr ')' | func '(' expr ')'
//! func  := 'exp' | 'ln' | 'plus'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`. `plus(u)` is `max(u, 0)`; `plus(x-0.6)^7` is the plus-power
//! `(x - 0.6)^7_+`.
//!
//! Constants are exact rationals. Subtrees made only of literals are folded
//! when the tree is built, and exact identities (`u * 1`, `u + 0`, `0 * u`)
//! are dropped so repeated derivatives stay small.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

mod diff;
mod eval;
mod parse;

pub use diff::{differentiate, differentiate_n, DiffError};
pub use eval::{evaluate, CompiledExpr};
pub use parse::{parse, ParseError, ParseErrorKind, SourceSpan};

/// Largest integer exponent accepted for exact folding and storage.
pub const MAX_INT_EXPONENT: i64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    Int(i64),
    /// A non-integer literal; evaluated as `exp(r ln u)`, not differentiable.
    Real(BigRational),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    Const(BigRational),
    X,
    Add(Box<ExprNode>, Box<ExprNode>),
    Sub(Box<ExprNode>, Box<ExprNode>),
    Mul(Box<ExprNode>, Box<ExprNode>),
    Div(Box<ExprNode>, Box<ExprNode>),
    Neg(Box<ExprNode>),
    Pow(Box<ExprNode>, Exponent),
    Exp(Box<ExprNode>),
    Ln(Box<ExprNode>),
    /// `max(u, 0)`
    Plus(Box<ExprNode>),
}

fn is_const(e: &ExprNode, v: i64) -> bool {
    matches!(e, ExprNode::Const(c) if *c == BigRational::from_integer(v.into()))
}

fn exact_pow(base: &BigRational, k: i64) -> Option<BigRational> {
    if k < 0 && base.is_zero() {
        return None;
    }
    let mag = num_traits::pow(base.clone(), k.unsigned_abs() as usize);
    Some(if k < 0 { mag.recip() } else { mag })
}

impl ExprNode {
    pub fn constant(value: BigRational) -> Self {
        ExprNode::Const(value)
    }

    pub fn int(value: i64) -> Self {
        ExprNode::Const(BigRational::from_integer(value.into()))
    }

    pub fn x() -> Self {
        ExprNode::X
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self {
            ExprNode::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn add(a: Self, b: Self) -> Self {
        match (a, b) {
            (ExprNode::Const(p), ExprNode::Const(q)) => ExprNode::Const(p + q),
            (a, b) if is_const(&b, 0) => a,
            (a, b) if is_const(&a, 0) => b,
            (a, b) => ExprNode::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Self, b: Self) -> Self {
        match (a, b) {
            (ExprNode::Const(p), ExprNode::Const(q)) => ExprNode::Const(p - q),
            (a, b) if is_const(&b, 0) => a,
            (a, b) if is_const(&a, 0) => Self::neg(b),
            (a, b) => ExprNode::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Self, b: Self) -> Self {
        match (a, b) {
            (ExprNode::Const(p), ExprNode::Const(q)) => ExprNode::Const(p * q),
            (a, b) if is_const(&a, 0) || is_const(&b, 0) => Self::int(0),
            (a, b) if is_const(&a, 1) => b,
            (a, b) if is_const(&b, 1) => a,
            // keep a single leading coefficient: c1 * (c2 * u) -> (c1 c2) * u
            (ExprNode::Const(p), ExprNode::Mul(inner, rest)) if inner.as_const().is_some() => {
                let q = inner.as_const().cloned().unwrap_or_default();
                Self::mul(ExprNode::Const(p * q), *rest)
            }
            (a, ExprNode::Const(q)) => Self::mul(ExprNode::Const(q), a),
            (a, b) => ExprNode::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Self, b: Self) -> Self {
        match (a, b) {
            (ExprNode::Const(p), ExprNode::Const(q)) if !q.is_zero() => ExprNode::Const(p / q),
            (a, b) if is_const(&b, 1) => a,
            (a, b) => ExprNode::Div(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Self) -> Self {
        match a {
            ExprNode::Const(p) => ExprNode::Const(-p),
            ExprNode::Neg(inner) => *inner,
            a => ExprNode::Neg(Box::new(a)),
        }
    }

    pub fn pow(base: Self, exponent: Exponent) -> Self {
        match exponent {
            Exponent::Int(0) => Self::int(1),
            Exponent::Int(1) => base,
            Exponent::Int(k) => match base {
                ExprNode::Const(c) => match exact_pow(&c, k) {
                    Some(v) => ExprNode::Const(v),
                    None => ExprNode::Pow(Box::new(ExprNode::Const(c)), Exponent::Int(k)),
                },
                ExprNode::Pow(inner, Exponent::Int(j)) if (j * k).abs() <= MAX_INT_EXPONENT => {
                    Self::pow(*inner, Exponent::Int(j * k))
                }
                base => ExprNode::Pow(Box::new(base), Exponent::Int(k)),
            },
            Exponent::Real(r) => ExprNode::Pow(Box::new(base), Exponent::Real(r)),
        }
    }

    /// Power with a rational exponent, stored as an integer when it is one.
    pub fn pow_ratio(base: Self, exponent: BigRational) -> Self {
        if exponent.is_integer() {
            if let Some(k) = exponent.to_integer().to_i64() {
                if k.abs() <= MAX_INT_EXPONENT {
                    return Self::pow(base, Exponent::Int(k));
                }
            }
        }
        Self::pow(base, Exponent::Real(exponent))
    }

    pub fn exp(a: Self) -> Self {
        if is_const(&a, 0) {
            return Self::int(1);
        }
        ExprNode::Exp(Box::new(a))
    }

    pub fn ln(a: Self) -> Self {
        if is_const(&a, 1) {
            return Self::int(0);
        }
        ExprNode::Ln(Box::new(a))
    }

    pub fn plus(a: Self) -> Self {
        match a {
            ExprNode::Const(c) => ExprNode::Const(if c.is_negative() { BigRational::zero() } else { c }),
            a => ExprNode::Plus(Box::new(a)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            ExprNode::Const(_) | ExprNode::X => 1,
            ExprNode::Add(a, b) | ExprNode::Sub(a, b) | ExprNode::Mul(a, b) | ExprNode::Div(a, b) => {
                1 + a.size() + b.size()
            }
            ExprNode::Neg(a) | ExprNode::Pow(a, _) | ExprNode::Exp(a) | ExprNode::Ln(a) | ExprNode::Plus(a) => {
                1 + a.size()
            }
        }
    }

    /// Abscissae where the tree contains a `plus` kink, when the argument is affine in x.
    pub fn plus_kinks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_kinks(&mut out);
        out
    }

    fn collect_kinks(&self, out: &mut Vec<f64>) {
        match self {
            ExprNode::Const(_) | ExprNode::X => {}
            ExprNode::Add(a, b) | ExprNode::Sub(a, b) | ExprNode::Mul(a, b) | ExprNode::Div(a, b) => {
                a.collect_kinks(out);
                b.collect_kinks(out);
            }
            ExprNode::Neg(a) | ExprNode::Pow(a, _) | ExprNode::Exp(a) | ExprNode::Ln(a) => a.collect_kinks(out),
            ExprNode::Plus(a) => {
                // root of an affine argument: value at 0 and slope from value at 1
                let f0 = evaluate::<f64>(a, &0.0);
                let f1 = evaluate::<f64>(a, &1.0);
                if let (Ok(f0), Ok(f1)) = (f0, f1) {
                    let slope = f1 - f0;
                    if slope != 0.0 {
                        out.push(-f0 / slope);
                    }
                }
                a.collect_kinks(out);
            }
        }
    }
}

fn is_terminating_decimal(denom: &BigInt) -> bool {
    let mut d = denom.clone();
    for p in [2u32, 5] {
        let p = BigInt::from(p);
        while (&d % &p).is_zero() {
            d /= &p;
        }
    }
    d.is_one()
}

/// Exact decimal text of a rational whose denominator has only factors 2 and 5.
fn decimal_text(r: &BigRational) -> String {
    let mag = r.abs();
    let mut scale = 0usize;
    let ten = BigInt::from(10);
    let mut value = mag.clone();
    while !value.is_integer() {
        value *= BigRational::from_integer(ten.clone());
        scale += 1;
    }
    let digits = value.to_integer().to_string();
    if scale == 0 {
        return digits;
    }
    let padded = format!("{:0>width$}", digits, width = scale + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - scale);
    format!("{int_part}.{frac_part}")
}

fn fmt_const(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let body =
        if is_terminating_decimal(r.denom()) { decimal_text(r) } else { format!("{}/{}", r.numer().abs(), r.denom()) };
    if r.is_negative() {
        write!(f, "(-{body})")
    } else if r.is_integer() || is_terminating_decimal(r.denom()) {
        f.write_str(&body)
    } else {
        write!(f, "({body})")
    }
}

/// Canonical, fully parenthesized form that parses back to an equivalent tree.
impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprNode::Const(c) => fmt_const(c, f),
            ExprNode::X => f.write_str("x"),
            ExprNode::Add(a, b) => write!(f, "({a} + {b})"),
            ExprNode::Sub(a, b) => write!(f, "({a} - {b})"),
            ExprNode::Mul(a, b) => write!(f, "({a} * {b})"),
            ExprNode::Div(a, b) => write!(f, "({a} / {b})"),
            ExprNode::Neg(a) => write!(f, "(-{a})"),
            ExprNode::Pow(a, Exponent::Int(k)) if *k < 0 => write!(f, "({a} ^ (-{}))", k.unsigned_abs()),
            ExprNode::Pow(a, Exponent::Int(k)) => write!(f, "({a} ^ {k})"),
            ExprNode::Pow(a, Exponent::Real(r)) => {
                write!(f, "({a} ^ ")?;
                fmt_const(r, f)?;
                f.write_str(")")
            }
            ExprNode::Exp(a) => write!(f, "exp({a})"),
            ExprNode::Ln(a) => write!(f, "ln({a})"),
            ExprNode::Plus(a) => write!(f, "plus({a})"),
        }
    }
}
