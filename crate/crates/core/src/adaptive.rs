//! Adaptive integration by uniform refinement.
//!
//! Starting from one subinterval, `n` grows until the two rules of the method
//! agree to within four times the tolerance, `|L_n - G_n| <= 4 eps`, and the
//! blend `Q_n` is returned. For 5-convex or 5-concave C^6 integrands this
//! guarantees `|integral - Q_n| <= eps`; the cubic method carries the
//! analogous guarantee for 3-convex or 3-concave integrands.
//!
//! The convexity hypothesis is the caller's responsibility. Outside that class
//! the criterion can be met without the error guarantee.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::composite::{composite_pair_with, CompositePair};
use crate::convexity::{check_n_convexity, ConvexityReport};
use crate::error::{QuadError, Result};
use crate::parallel::Execution;
use crate::rules::{Integrand, Interval, Method};
use crate::scalar::Scalar;

pub const DEFAULT_N_MAX: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SearchStrategy {
    /// n = 1, 2, 3, ... until the criterion holds; finds the minimal n.
    #[default]
    LinearMinimal,
    /// Doubles n until the criterion holds, then bisects the last doubling
    /// step. Minimal whenever the gap sequence is non-increasing.
    DoublingBisect,
}

/// Sampled convexity check run before integrating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 200, seed: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdaptiveOptions {
    pub strategy: SearchStrategy,
    pub n_max: usize,
    pub execution: Execution,
    /// When set, the result carries a convexity report for the method's class.
    pub verify: Option<VerifyOptions>,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            strategy: SearchStrategy::LinearMinimal,
            n_max: DEFAULT_N_MAX,
            execution: Execution::Sequential,
            verify: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRecord<T> {
    pub n: usize,
    pub gap: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptiveResult<T> {
    pub method: Method,
    pub strategy: SearchStrategy,
    /// `Q_n` at the accepted `n`.
    pub value: T,
    pub n_final: usize,
    /// `|L_n - G_n|` at the accepted `n`.
    pub gap_final: T,
    pub epsilon: T,
    /// Integrand evaluations over every probed `n`.
    pub evaluations: usize,
    /// Probed `(n, gap)` pairs in probe order; the last entry is `n_final`.
    pub history: Vec<GapRecord<T>>,
    pub convexity: Option<ConvexityReport>,
}

impl<T: Scalar> AdaptiveResult<T> {
    /// The guaranteed error bound `gap_final / 4` (valid under the convexity hypothesis).
    pub fn error_bound(&self) -> T {
        self.gap_final.clone() / T::from_i64(4)
    }
}

/// Quintic (Gauss3/Lobatto4) adaptive integration.
pub fn integrate_adaptive<T, F>(
    f: &F,
    iv: &Interval<T>,
    eps: &T,
    strategy: SearchStrategy,
    n_max: usize,
) -> Result<AdaptiveResult<T>>
where
    T: Scalar,
    F: Integrand<T> + ?Sized,
{
    let opts = AdaptiveOptions { strategy, n_max, ..AdaptiveOptions::default() };
    integrate_with(Method::Quintic, f, iv, eps, &opts)
}

/// Cubic (Chebyshev3/Simpson) baseline with blend `(3 C + S) / 4` and
/// criterion `|S_n - C_n| <= 4 eps`.
pub fn integrate_adaptive_cubic<T, F>(
    f: &F,
    iv: &Interval<T>,
    eps: &T,
    strategy: SearchStrategy,
    n_max: usize,
) -> Result<AdaptiveResult<T>>
where
    T: Scalar,
    F: Integrand<T> + ?Sized,
{
    let opts = AdaptiveOptions { strategy, n_max, ..AdaptiveOptions::default() };
    integrate_with(Method::Cubic, f, iv, eps, &opts)
}

/// `|L_n - G_n|` for the quintic pair.
pub fn stopping_gap<T, F>(f: &F, iv: &Interval<T>, n: usize) -> Result<T>
where
    T: Scalar,
    F: Integrand<T> + ?Sized,
{
    Ok(composite_pair_with(Method::Quintic, f, iv, n, Execution::Sequential)?.gap())
}

/// Roundoff units of slack in the smallest gap the stopping test can resolve.
pub const FLOOR_ROUNDOFF_UNITS: i64 = 1800;

/// Smallest `4 eps` the stopping test can resolve at the precision of `T`
/// for an integral of magnitude `scale`: `1800 u max(1, |scale|)`. In
/// hardware doubles this is about `4e-13` for unit-sized integrals.
pub fn resolvable_gap<T: Scalar>(scale: &T) -> T {
    T::from_i64(FLOOR_ROUNDOFF_UNITS) * T::unit_roundoff() * T::one().max_of(scale.abs())
}

/// Whether `|L_n - G_n| <= 4 eps` is decidable above roundoff.
pub fn is_resolvable<T: Scalar>(eps: &T, scale: &T) -> bool {
    T::from_i64(4) * eps.clone() >= resolvable_gap(scale)
}

struct Search<'a, T, F: ?Sized> {
    method: Method,
    f: &'a F,
    iv: &'a Interval<T>,
    threshold: T,
    execution: Execution,
    probes: BTreeMap<usize, CompositePair<T>>,
    history: Vec<GapRecord<T>>,
    evaluations: usize,
}

impl<T, F> Search<'_, T, F>
where
    T: Scalar,
    F: Integrand<T> + ?Sized,
{
    /// Evaluates the pair at `n` (once) and reports whether the criterion holds.
    fn accepts(&mut self, n: usize) -> Result<bool> {
        if let Some(p) = self.probes.get(&n) {
            return Ok(p.gap() <= self.threshold);
        }
        let pair = composite_pair_with(self.method, self.f, self.iv, n, self.execution)?;
        let gap = pair.gap();
        if !gap.is_finite() {
            return Err(QuadError::InvalidArgument(format!("non-finite gap at n = {n}")));
        }
        self.evaluations += pair.evaluations;
        self.history.push(GapRecord { n, gap: gap.clone() });
        self.probes.insert(n, pair);
        Ok(gap <= self.threshold)
    }

    fn budget_error(&self, n_max: usize) -> QuadError {
        let best = self.history.iter().min_by(|a, b| a.gap.partial_cmp(&b.gap).unwrap_or(std::cmp::Ordering::Equal));
        let (best_n, best_gap) = best.map(|r| (r.n, r.gap.to_f64())).unwrap_or((0, f64::INFINITY));
        QuadError::BudgetExceeded { n_max, best_n, best_gap }
    }

    fn linear(&mut self, n_max: usize) -> Result<usize> {
        for n in 1..=n_max {
            if self.accepts(n)? {
                return Ok(n);
            }
        }
        Err(self.budget_error(n_max))
    }

    fn doubling(&mut self, n_max: usize) -> Result<usize> {
        let mut lo = 0; // largest probed n known to fail
        let mut hi = 1;
        loop {
            let probe = hi.min(n_max);
            if self.accepts(probe)? {
                hi = probe;
                break;
            }
            if probe == n_max {
                return Err(self.budget_error(n_max));
            }
            lo = probe;
            hi = probe.saturating_mul(2);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.accepts(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

/// Adaptive integration with an explicit method and options.
pub fn integrate_with<T, F>(
    method: Method,
    f: &F,
    iv: &Interval<T>,
    eps: &T,
    opts: &AdaptiveOptions,
) -> Result<AdaptiveResult<T>>
where
    T: Scalar,
    F: Integrand<T> + ?Sized,
{
    if !(*eps > T::zero()) || !eps.is_finite() {
        return Err(QuadError::InvalidTolerance(eps.to_decimal_string()));
    }
    if opts.n_max == 0 {
        return Err(QuadError::ZeroSubintervals);
    }
    let convexity = match opts.verify {
        Some(v) => Some(check_n_convexity(f, iv, method.convexity_order(), v.samples, v.seed)?),
        None => None,
    };

    let mut search = Search {
        method,
        f,
        iv,
        threshold: T::from_i64(4) * eps.clone(),
        execution: opts.execution,
        probes: BTreeMap::new(),
        history: Vec::new(),
        evaluations: 0,
    };
    let n_final = match opts.strategy {
        SearchStrategy::LinearMinimal => search.linear(opts.n_max)?,
        SearchStrategy::DoublingBisect => search.doubling(opts.n_max)?,
    };
    let pair = search.probes.remove(&n_final).expect("accepted n was probed");
    let mut history = search.history;
    if history.last().map(|r| r.n) != Some(n_final) {
        history.push(GapRecord { n: n_final, gap: pair.gap() });
    }
    Ok(AdaptiveResult {
        method,
        strategy: opts.strategy,
        gap_final: pair.gap(),
        value: pair.q_n,
        n_final,
        epsilon: eps.clone(),
        evaluations: search.evaluations,
        history,
        convexity,
    })
}
