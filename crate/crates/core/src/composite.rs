//! Uniform composite rules and their a-priori error bounds.
//!
//! A composite evaluation samples the integrand once per distinct abscissa:
//! partition points are shared by adjacent subintervals and nodes common to
//! both rules of a pair (the midpoint of Chebyshev3 and Simpson) are shared
//! within a subinterval. Sharing changes the evaluation count, never the
//! values: every subinterval sum is formed exactly as [`RuleTable::apply`]
//! would form it, and subinterval sums are added left to right.

use serde::Serialize;

use crate::error::{QuadError, Result};
use crate::expr::{differentiate_n, ExprNode};
use crate::parallel::{map_indexed, Execution};
use crate::rules::{blend_q, eval_checked, map_node, Integrand, Interval, Method, RuleId, RuleTable};
use crate::scalar::Scalar;

/// Where a rule's node samples come from.
#[derive(Debug, Clone, Copy)]
enum Source {
    Left,
    Right,
    Interior(usize),
}

/// Evaluation plan for one or two rules over a uniform partition.
struct Plan<T> {
    tables: Vec<RuleTable<T>>,
    /// Canonical interior nodes shared by all tables, ascending.
    interior: Vec<T>,
    /// Per table, per point: where its sample comes from.
    sources: Vec<Vec<Source>>,
    uses_endpoints: bool,
}

impl<T: Scalar> Plan<T> {
    fn new(rules: &[RuleId]) -> Self {
        let tables: Vec<RuleTable<T>> = rules.iter().map(|&id| RuleTable::new(id)).collect();
        let mut interior: Vec<T> = Vec::new();
        let mut uses_endpoints = false;
        for t in &tables {
            for p in t.points() {
                if p.node == -T::one() || p.node == T::one() {
                    uses_endpoints = true;
                } else if !interior.contains(&p.node) {
                    interior.push(p.node.clone());
                }
            }
        }
        interior.sort_by(|x, y| x.partial_cmp(y).expect("finite nodes"));
        let sources = tables
            .iter()
            .map(|t| {
                t.points()
                    .iter()
                    .map(|p| {
                        if p.node == -T::one() {
                            Source::Left
                        } else if p.node == T::one() {
                            Source::Right
                        } else {
                            Source::Interior(interior.iter().position(|x| *x == p.node).expect("node registered"))
                        }
                    })
                    .collect()
            })
            .collect();
        Plan { tables, interior, sources, uses_endpoints }
    }

    fn evaluations(&self, n: usize) -> usize {
        n * self.interior.len() + if self.uses_endpoints { n + 1 } else { 0 }
    }

    /// Per-subinterval rule values, `result[k][r]` for subinterval `k + 1` and table `r`.
    fn subinterval_values<F>(&self, f: &F, iv: &Interval<T>, n: usize, exec: Execution) -> Result<Vec<Vec<T>>>
    where
        F: Integrand<T> + ?Sized,
    {
        if n == 0 {
            return Err(QuadError::ZeroSubintervals);
        }
        let points = map_indexed(exec, n + 1, |k| iv.partition_point(k, n));

        let ends: Vec<T> = if self.uses_endpoints {
            let evaluated = map_indexed(exec, n + 1, |k| eval_checked(f, &points[k]));
            let mut ends = Vec::with_capacity(n + 1);
            for (k, v) in evaluated.into_iter().enumerate() {
                ends.push(v.map_err(|e| e.in_subinterval(k.max(1)))?);
            }
            ends
        } else {
            Vec::new()
        };

        let two = T::from_i64(2);
        let sums = map_indexed(exec, n, |k| -> Result<Vec<T>> {
            let (lo, hi) = (&points[k], &points[k + 1]);
            let mid = (lo.clone() + hi.clone()) / two.clone();
            let half = (hi.clone() - lo.clone()) / two.clone();
            let mut samples = Vec::with_capacity(self.interior.len());
            for node in &self.interior {
                let x = map_node(node, &mid, &half, lo, hi);
                samples.push(eval_checked(f, &x).map_err(|e| e.in_subinterval(k + 1))?);
            }
            let values = self
                .tables
                .iter()
                .zip(&self.sources)
                .map(|(table, sources)| {
                    let mut sum = T::zero();
                    for (p, src) in table.points().iter().zip(sources) {
                        let y = match *src {
                            Source::Left => &ends[k],
                            Source::Right => &ends[k + 1],
                            Source::Interior(j) => &samples[j],
                        };
                        sum = sum + p.weight.clone() * y.clone();
                    }
                    half.clone() * sum
                })
                .collect();
            Ok(values)
        });
        sums.into_iter().collect()
    }
}

/// Composite values of a lower/upper rule pair on `n` equal subintervals.
///
/// For [`Method::Quintic`] `g_n` is the Gauss sum and `l_n` the Lobatto sum;
/// for [`Method::Cubic`] they hold the Chebyshev and Simpson sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositePair<T> {
    pub method: Method,
    pub n: usize,
    pub g_n: T,
    pub l_n: T,
    /// Sum of the per-subinterval blends `(3 G + L) / 4`.
    pub q_n: T,
    pub evaluations: usize,
}

impl<T: Scalar> CompositePair<T> {
    /// The stopping-criterion quantity `|L_n - G_n|`.
    pub fn gap(&self) -> T {
        (self.l_n.clone() - self.g_n.clone()).abs()
    }
}

pub fn composite_rule<T, F>(rule: RuleId, f: &F, iv: &Interval<T>, n: usize) -> Result<T>
where
    T: Scalar,
    F: Integrand<T> + ?Sized,
{
    composite_rule_with(rule, f, iv, n, Execution::Sequential)
}

/// `sum_{k=1..n} rule[f; x_{k-1}, x_k]` with `x_k = a + k (b - a) / n`.
pub fn composite_rule_with<T, F>(rule: RuleId, f: &F, iv: &Interval<T>, n: usize, exec: Execution) -> Result<T>
where
    T: Scalar,
    F: Integrand<T> + ?Sized,
{
    let plan = Plan::new(&[rule]);
    let values = plan.subinterval_values(f, iv, n, exec)?;
    Ok(values.into_iter().fold(T::zero(), |acc, v| acc + v[0].clone()))
}

/// Gauss3/Lobatto4 composite values and their blend.
pub fn composite_pair<T, F>(f: &F, iv: &Interval<T>, n: usize) -> Result<CompositePair<T>>
where
    T: Scalar,
    F: Integrand<T> + ?Sized,
{
    composite_pair_with(Method::Quintic, f, iv, n, Execution::Sequential)
}

pub fn composite_pair_with<T, F>(
    method: Method,
    f: &F,
    iv: &Interval<T>,
    n: usize,
    exec: Execution,
) -> Result<CompositePair<T>>
where
    T: Scalar,
    F: Integrand<T> + ?Sized,
{
    let plan = Plan::new(&[method.lower_rule(), method.upper_rule()]);
    let values = plan.subinterval_values(f, iv, n, exec)?;
    let mut g_n = T::zero();
    let mut l_n = T::zero();
    let mut q_n = T::zero();
    for v in values {
        let (g, l) = (v[0].clone(), v[1].clone());
        q_n = q_n + blend_q(g.clone(), l.clone());
        g_n = g_n + g;
        l_n = l_n + l;
    }
    Ok(CompositePair { method, n, g_n, l_n, q_n, evaluations: plan.evaluations(n) })
}

/// Denominator of the sixth-order composite error bound.
fn bound_constant(rule: RuleId) -> Result<i64> {
    match rule {
        RuleId::Gauss3 => Ok(2_016_000),
        RuleId::Lobatto4 => Ok(1_512_000),
        other => Err(QuadError::UnsupportedRule(other)),
    }
}

/// Worst-case composite error `(b - a)^7 / (C n^6) * m6`, where `m6` bounds
/// `|f^(6)|` on the interval and `C` is 2016000 (Gauss3) or 1512000 (Lobatto4).
pub fn apriori_bound<T: Scalar>(rule: RuleId, iv: &Interval<T>, n: usize, m6: &T) -> Result<T> {
    let c = bound_constant(rule)?;
    if n == 0 {
        return Err(QuadError::ZeroSubintervals);
    }
    if !(*m6 >= T::zero()) || !m6.is_finite() {
        return Err(QuadError::InvalidArgument(format!("sixth-derivative bound must be non-negative, got {m6}")));
    }
    let denom = T::from_i64(c) * T::from_i64(n as i64).powi(6);
    Ok(iv.width().powi(7) / denom * m6.clone())
}

/// Smallest `n` whose a-priori bound does not exceed `eps`.
pub fn min_n_for_bound<T: Scalar>(rule: RuleId, iv: &Interval<T>, m6: &T, eps: &T) -> Result<usize> {
    bound_constant(rule)?;
    if !(*eps > T::zero()) || !eps.is_finite() {
        return Err(QuadError::InvalidTolerance(eps.to_decimal_string()));
    }
    let at_one = apriori_bound(rule, iv, 1, m6)?;
    if at_one <= *eps {
        return Ok(1);
    }
    // Sixth root for the estimate, then step to the exact boundary.
    let estimate = (at_one.to_f64() / eps.to_f64()).powf(1.0 / 6.0);
    let mut n = if estimate.is_finite() { (estimate.ceil() as usize).max(1) } else { 1 };
    while n > 1 && apriori_bound(rule, iv, n - 1, m6)? <= *eps {
        n -= 1;
    }
    while apriori_bound(rule, iv, n, m6)? > *eps {
        n += 1;
    }
    Ok(n)
}

/// Sampled maximum of `|f^(6)|`, for use with [`apriori_bound`].
///
/// Heuristic: the maximum is taken over a grid, so it can miss narrow peaks
/// and is not a rigorous bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SixthDerivativeEstimate<T> {
    pub max_abs: T,
    pub argmax: f64,
    pub samples: usize,
}

pub const DEFAULT_M6_SAMPLES: usize = 1025;

pub fn estimate_sixth_derivative_bound<T: Scalar>(
    e: &ExprNode,
    iv: &Interval<T>,
    samples: usize,
) -> Result<SixthDerivativeEstimate<T>> {
    if samples < 2 {
        return Err(QuadError::InvalidArgument("need at least two samples".to_string()));
    }
    let d6 = differentiate_n(e, 6)?.compile::<T>();
    let grid = samples - 1;
    let mut best = SixthDerivativeEstimate { max_abs: T::zero(), argmax: iv.a().to_f64(), samples };
    for k in 0..=grid {
        let x = iv.partition_point(k, grid);
        let v = eval_checked(&d6, &x)?.abs();
        if v > best.max_abs {
            best.max_abs = v;
            best.argmax = x.to_f64();
        }
    }
    Ok(best)
}
