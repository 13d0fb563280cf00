//! Reference integrands with closed-form integrals and a known sign of the
//! sixth derivative on their interval.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::expr::{parse, CompiledExpr, ExprNode};
use crate::rules::Interval;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    /// `f^(6) >= 0`: 5-convex.
    Convex,
    /// `f^(6) <= 0`: 5-concave.
    Concave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceId {
    Reciprocal,
    ExpUnit,
    ExpTen,
    PlusPowerSix,
    PlusPowerSeven,
    NegExp,
    Log,
    Sextic,
    Septic,
    ExpDecay,
    InverseSquare,
    NegOctic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reference {
    pub id: ReferenceId,
    pub text: &'static str,
    pub a: i64,
    pub b: i64,
    pub curvature: Curvature,
    /// Infinitely differentiable on the interval (plus-powers are only C^6).
    pub smooth: bool,
}

const fn r(id: ReferenceId, text: &'static str, a: i64, b: i64, curvature: Curvature, smooth: bool) -> Reference {
    Reference { id, text, a, b, curvature, smooth }
}

pub const REFERENCES: [Reference; 12] = {
    use Curvature::*;
    use ReferenceId::*;
    [
        r(Reciprocal, "1/x", 1, 2, Convex, true),
        r(ExpUnit, "exp(x)", 0, 1, Convex, true),
        r(ExpTen, "exp(x)", 0, 10, Convex, true),
        r(PlusPowerSix, "plus(x-0.6)^7", -1, 1, Convex, false),
        r(PlusPowerSeven, "plus(x-0.7)^7", -1, 1, Convex, false),
        r(NegExp, "-exp(x)", 0, 2, Concave, true),
        r(Log, "ln(x)", 1, 3, Concave, true),
        r(Sextic, "x^6", -1, 1, Convex, true),
        r(Septic, "x^7", 0, 2, Convex, true),
        r(ExpDecay, "exp(-x)", 0, 3, Convex, true),
        r(InverseSquare, "x^(-2)", 1, 3, Convex, true),
        r(NegOctic, "-x^8", -1, 2, Concave, true),
    ]
};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Reference {
    pub fn expr(&self) -> ExprNode {
        parse(self.text).expect("reference expressions parse")
    }

    pub fn compile<T: Scalar>(&self) -> CompiledExpr<T> {
        self.expr().compile()
    }

    pub fn interval<T: Scalar>(&self) -> Interval<T> {
        Interval::new(T::from_i64(self.a), T::from_i64(self.b)).expect("reference intervals are valid")
    }

    /// The exact integral over `[a, b]` evaluated in `T`.
    pub fn integral<T: Scalar>(&self) -> T {
        use ReferenceId::*;
        let int = T::from_i64;
        match self.id {
            Reciprocal => int(2).ln(),
            ExpUnit => T::one().exp() - T::one(),
            ExpTen => int(10).exp() - T::one(),
            // (1 - c)^8 / 8
            PlusPowerSix => T::from_ratio(&(num_traits::pow(ratio(2, 5), 8) / ratio(8, 1))),
            PlusPowerSeven => T::from_ratio(&(num_traits::pow(ratio(3, 10), 8) / ratio(8, 1))),
            NegExp => T::one() - int(2).exp(),
            Log => int(3) * int(3).ln() - int(2),
            Sextic => T::from_ratio(&ratio(2, 7)),
            Septic => int(32),
            ExpDecay => T::one() - int(-3).exp(),
            InverseSquare => T::from_ratio(&ratio(2, 3)),
            NegOctic => int(-57),
        }
    }

    /// `max |f^(6)|` over `[a, b]`.
    pub fn sixth_derivative_bound<T: Scalar>(&self) -> T {
        use ReferenceId::*;
        let int = T::from_i64;
        match self.id {
            Reciprocal => int(720),
            ExpUnit => T::one().exp(),
            ExpTen => int(10).exp(),
            PlusPowerSix => int(2016),
            PlusPowerSeven => int(1512),
            NegExp => int(2).exp(),
            Log => int(120),
            Sextic => int(720),
            Septic => int(10080),
            ExpDecay => T::one(),
            InverseSquare => int(5040),
            NegOctic => int(80640),
        }
    }
}
