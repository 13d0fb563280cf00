//! Simple (non-composite) quadrature rules on an arbitrary interval.
//!
//! Tables are stored in canonical form on `[-1, 1]` and mapped affinely onto
//! `[a, b]`. Nodes are built from radicals at the active precision, so an
//! arbitrary-precision run gets full-precision nodes.

use serde::{Deserialize, Serialize};

use crate::error::{DomainReason, EvalError, QuadError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleId {
    /// Three-point Gauss–Legendre, exact through degree 5.
    Gauss3,
    /// Four-point Gauss–Lobatto, exact through degree 5.
    Lobatto4,
    /// Simpson's rule, exact through degree 3.
    Simpson,
    /// Three-point Chebyshev (equal weights), exact through degree 3.
    Chebyshev3,
}

impl RuleId {
    pub const ALL: [RuleId; 4] = [RuleId::Gauss3, RuleId::Lobatto4, RuleId::Simpson, RuleId::Chebyshev3];

    /// Highest polynomial degree integrated exactly.
    pub fn exact_degree(self) -> u32 {
        match self {
            RuleId::Gauss3 | RuleId::Lobatto4 => 5,
            RuleId::Simpson | RuleId::Chebyshev3 => 3,
        }
    }
}

/// A lower/upper rule pair driving one adaptive method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Gauss3 against Lobatto4, for 5-convex or 5-concave integrands.
    Quintic,
    /// Chebyshev3 against Simpson, for 3-convex or 3-concave integrands.
    Cubic,
}

impl Method {
    /// Rule that underestimates the integral of a convex-class integrand.
    pub fn lower_rule(self) -> RuleId {
        match self {
            Method::Quintic => RuleId::Gauss3,
            Method::Cubic => RuleId::Chebyshev3,
        }
    }

    /// Rule that overestimates the integral of a convex-class integrand.
    pub fn upper_rule(self) -> RuleId {
        match self {
            Method::Quintic => RuleId::Lobatto4,
            Method::Cubic => RuleId::Simpson,
        }
    }

    /// Order `n` of the n-convexity class the stopping criterion is proven for.
    pub fn convexity_order(self) -> usize {
        match self {
            Method::Quintic => 5,
            Method::Cubic => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Quintic => "quintic",
            Method::Cubic => "cubic",
        }
    }
}

/// A real function of one variable. Implementations must be pure: the same
/// input always yields the same output and no shared state is mutated.
pub trait Integrand<T>: Sync {
    fn eval(&self, x: &T) -> std::result::Result<T, EvalError>;
}

impl<T, F> Integrand<T> for F
where
    F: Fn(&T) -> T + Sync,
{
    fn eval(&self, x: &T) -> std::result::Result<T, EvalError> {
        Ok(self(x))
    }
}

/// Evaluates `f` and rejects non-finite output.
pub(crate) fn eval_checked<T: Scalar, F: Integrand<T> + ?Sized>(f: &F, x: &T) -> Result<T> {
    let y = f.eval(x)?;
    if y.is_finite() {
        Ok(y)
    } else {
        Err(EvalError::new(x.to_f64(), DomainReason::NonFinite).into())
    }
}

/// A validated integration interval `[a, b]` with finite `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval<T> {
    a: T,
    b: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Interval { a, b })
        } else {
            Err(QuadError::InvalidInterval { a: a.to_decimal_string(), b: b.to_decimal_string() })
        }
    }

    /// Interval from two doubles; convenient for tests and literals.
    pub fn from_f64(a: f64, b: f64) -> Result<Self> {
        Self::new(T::from_f64(a), T::from_f64(b))
    }

    pub fn a(&self) -> &T {
        &self.a
    }

    pub fn b(&self) -> &T {
        &self.b
    }

    pub fn width(&self) -> T {
        self.b.clone() - self.a.clone()
    }

    /// Point `k` of the uniform partition into `n` pieces: `a + k (b - a) / n`,
    /// with both ends reproduced exactly.
    pub fn partition_point(&self, k: usize, n: usize) -> T {
        if k == 0 {
            self.a.clone()
        } else if k == n {
            self.b.clone()
        } else {
            self.a.clone() + self.width() * T::from_i64(k as i64) / T::from_i64(n as i64)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RulePoint<T> {
    pub node: T,
    pub weight: T,
}

/// Canonical nodes and weights of a simple rule on `[-1, 1]`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleTable<T> {
    id: RuleId,
    points: Vec<RulePoint<T>>,
}

fn ratio<T: Scalar>(p: i64, q: i64) -> T {
    T::from_i64(p) / T::from_i64(q)
}

impl<T: Scalar> RuleTable<T> {
    pub fn new(id: RuleId) -> Self {
        let pairs: Vec<(T, T)> = match id {
            RuleId::Gauss3 => {
                // sqrt(3/5) = sqrt(15) / 5
                let d = T::from_i64(15).sqrt() / T::from_i64(5);
                let outer = ratio::<T>(5, 9);
                vec![(-d.clone(), outer.clone()), (T::zero(), ratio(8, 9)), (d, outer)]
            }
            RuleId::Lobatto4 => {
                // 1/sqrt(5) = sqrt(5) / 5
                let d = T::from_i64(5).sqrt() / T::from_i64(5);
                let end = ratio::<T>(1, 6);
                let inner = ratio::<T>(5, 6);
                vec![(-T::one(), end.clone()), (-d.clone(), inner.clone()), (d, inner), (T::one(), end)]
            }
            RuleId::Simpson => {
                let end = ratio::<T>(1, 3);
                vec![(-T::one(), end.clone()), (T::zero(), ratio(4, 3)), (T::one(), end)]
            }
            RuleId::Chebyshev3 => {
                let d = T::from_i64(2).sqrt() / T::from_i64(2);
                let w = ratio::<T>(2, 3);
                vec![(-d.clone(), w.clone()), (T::zero(), w.clone()), (d, w)]
            }
        };
        let points = pairs.into_iter().map(|(node, weight)| RulePoint { node, weight }).collect();
        RuleTable { id, points }
    }

    pub fn id(&self) -> RuleId {
        self.id
    }

    pub fn points(&self) -> &[RulePoint<T>] {
        &self.points
    }

    /// Applies the rule on `[lo, hi]` without validating the interval.
    pub(crate) fn apply_on<F: Integrand<T> + ?Sized>(&self, f: &F, lo: &T, hi: &T) -> Result<T> {
        let mid = (lo.clone() + hi.clone()) / T::from_i64(2);
        let half = (hi.clone() - lo.clone()) / T::from_i64(2);
        let mut sum = T::zero();
        for p in &self.points {
            let x = map_node(&p.node, &mid, &half, lo, hi);
            sum = sum + p.weight.clone() * eval_checked(f, &x)?;
        }
        Ok(half * sum)
    }

    /// `(b - a)/2 * sum_k w_k f(mid + (b - a)/2 * node_k)`, summed in node order.
    pub fn apply<F: Integrand<T> + ?Sized>(&self, f: &F, iv: &Interval<T>) -> Result<T> {
        self.apply_on(f, iv.a(), iv.b())
    }
}

/// Image of a canonical node on `[lo, hi]`; the endpoints `-1` and `1` land
/// exactly on `lo` and `hi`.
pub(crate) fn map_node<T: Scalar>(node: &T, mid: &T, half: &T, lo: &T, hi: &T) -> T {
    if *node == -T::one() {
        lo.clone()
    } else if *node == T::one() {
        hi.clone()
    } else {
        mid.clone() + half.clone() * node.clone()
    }
}

pub fn rule_table<T: Scalar>(id: RuleId) -> RuleTable<T> {
    RuleTable::new(id)
}

pub fn apply_rule<T: Scalar, F: Integrand<T> + ?Sized>(id: RuleId, f: &F, iv: &Interval<T>) -> Result<T> {
    RuleTable::new(id).apply(f, iv)
}

/// The blend `Q = (3 G + L) / 4`: the midpoint of `G` and `(G + L) / 2`.
pub fn blend_q<T: Scalar>(g_value: T, l_value: T) -> T {
    (T::from_i64(3) * g_value + l_value) / T::from_i64(4)
}
