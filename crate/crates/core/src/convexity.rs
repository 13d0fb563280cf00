//! Divided differences and sampled evidence of higher-order convexity.
//!
//! A function is n-convex when every divided difference over n + 2 distinct
//! points is non-negative. Sampling can only ever produce evidence, so the
//! report distinguishes "consistent with" from a proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{QuadError, Result};
use crate::expr::{differentiate_n, ExprNode};
use crate::rules::{eval_checked, Integrand, Interval};
use crate::scalar::Scalar;

/// Multiplier on unit roundoff in the "numerically zero" threshold.
const ZERO_TOLERANCE_ULPS: i64 = 64;

/// Triangular table of divided differences: `entry(k, i) = [x_i, ..., x_{i+k}; f]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DividedDifferenceTable<T> {
    points: Vec<T>,
    table: Vec<Vec<T>>,
}

impl<T: Scalar> DividedDifferenceTable<T> {
    pub fn new(points: Vec<T>, values: Vec<T>) -> Result<Self> {
        if points.is_empty() || points.len() != values.len() {
            return Err(QuadError::InvalidArgument(format!(
                "divided differences need equally many points and values (got {} and {})",
                points.len(),
                values.len()
            )));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(QuadError::InvalidArgument("divided differences need strictly increasing points".to_string()));
        }
        let m = points.len();
        let mut table = Vec::with_capacity(m);
        table.push(values);
        for k in 1..m {
            let prev = &table[k - 1];
            let row = (0..m - k)
                .map(|i| (prev[i + 1].clone() - prev[i].clone()) / (points[i + k].clone() - points[i].clone()))
                .collect();
            table.push(row);
        }
        Ok(DividedDifferenceTable { points, table })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    /// Highest order available (number of points minus one).
    pub fn order(&self) -> usize {
        self.points.len() - 1
    }

    /// `[x_i, ..., x_{i+k}; f]`
    pub fn entry(&self, k: usize, i: usize) -> Option<&T> {
        self.table.get(k).and_then(|row| row.get(i))
    }

    /// Divided difference over all points.
    pub fn top(&self) -> &T {
        &self.table[self.order()][0]
    }
}

/// `[x_0, ..., x_m; f]` for strictly increasing points.
pub fn divided_difference<T: Scalar>(points: &[T], values: &[T]) -> Result<T> {
    let t = DividedDifferenceTable::new(points.to_vec(), values.to_vec())?;
    Ok(t.top().clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ConsistentWithConvex,
    ConsistentWithConcave,
    Violated,
    Indeterminate,
}

impl Verdict {
    fn from_counts(positive: usize, negative: usize) -> Self {
        match (positive > 0, negative > 0) {
            (true, true) => Verdict::Violated,
            (true, false) => Verdict::ConsistentWithConvex,
            (false, true) => Verdict::ConsistentWithConcave,
            (false, false) => Verdict::Indeterminate,
        }
    }

    /// The verdict for the negated function.
    pub fn mirrored(self) -> Self {
        match self {
            Verdict::ConsistentWithConvex => Verdict::ConsistentWithConcave,
            Verdict::ConsistentWithConcave => Verdict::ConsistentWithConvex,
            other => other,
        }
    }
}

/// Which notion of convexity a report tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// Signs of sampled divided differences of order `order + 1`.
    DividedDifferences,
    /// Signs of the symbolic derivative of order `order + 1` on a grid.
    Derivative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub evidence: Evidence,
    /// The n in n-convexity.
    pub order: usize,
    pub samples_tested: usize,
    pub min_divided_difference: f64,
    /// Point tuple attaining the minimum.
    pub witness: Vec<f64>,
    pub max_divided_difference: f64,
    pub max_witness: Vec<f64>,
    /// Samples above, below and within the zero threshold.
    pub positive: usize,
    pub negative: usize,
    pub near_zero: usize,
    pub verdict: Verdict,
}

struct Tally {
    min: Option<(f64, Vec<f64>)>,
    max: Option<(f64, Vec<f64>)>,
    positive: usize,
    negative: usize,
    near_zero: usize,
}

impl Tally {
    fn new() -> Self {
        Tally { min: None, max: None, positive: 0, negative: 0, near_zero: 0 }
    }

    fn record<T: Scalar>(&mut self, value: &T, tolerance: &T, witness: impl Fn() -> Vec<f64>) {
        if *value > tolerance.clone() {
            self.positive += 1;
        } else if *value < -tolerance.clone() {
            self.negative += 1;
        } else {
            self.near_zero += 1;
        }
        let v = value.to_f64();
        if self.min.as_ref().is_none_or(|(m, _)| v < *m) {
            self.min = Some((v, witness()));
        }
        if self.max.as_ref().is_none_or(|(m, _)| v > *m) {
            self.max = Some((v, witness()));
        }
    }

    fn finish(self, evidence: Evidence, order: usize, samples_tested: usize) -> ConvexityReport {
        let (min_value, witness) = self.min.unwrap_or((0.0, Vec::new()));
        let (max_value, max_witness) = self.max.unwrap_or((0.0, Vec::new()));
        ConvexityReport {
            evidence,
            order,
            samples_tested,
            min_divided_difference: min_value,
            witness,
            max_divided_difference: max_value,
            max_witness,
            positive: self.positive,
            negative: self.negative,
            near_zero: self.near_zero,
            verdict: Verdict::from_counts(self.positive, self.negative),
        }
    }
}

/// Point tuples for the sampled test: consecutive windows of an equispaced
/// grid first, then seeded random tuples with a minimum spacing.
fn sample_tuples<T: Scalar>(iv: &Interval<T>, width: usize, samples: usize, seed: u64) -> Vec<Vec<T>> {
    let windows = samples.div_ceil(2);
    let random = samples - windows;
    let mut tuples = Vec::with_capacity(samples);

    let grid_len = windows + width - 1;
    let grid: Vec<T> = (0..grid_len).map(|j| iv.partition_point(j, grid_len - 1)).collect();
    for i in 0..windows {
        tuples.push(grid[i..i + width].to_vec());
    }

    let span = iv.width().to_f64();
    let min_gap = span * 1e-3 / samples as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while tuples.len() < windows + random {
        let mut u: Vec<f64> = (0..width).map(|_| rng.gen::<f64>()).collect();
        u.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        if u.windows(2).any(|w| (w[1] - w[0]) * span < min_gap) {
            continue;
        }
        let pts: Vec<T> = u.iter().map(|&t| iv.a().clone() + iv.width() * T::from_f64(t)).collect();
        if pts.windows(2).all(|w| w[0] < w[1]) {
            tuples.push(pts);
        }
    }
    tuples
}

/// Samples divided differences over `order + 2` points and aggregates their signs.
///
/// A difference counts as zero when its magnitude is at most
/// `64 u max|f(x_i)| / h^(order+1)`, with `u` the unit roundoff and `h` the
/// smallest spacing in the tuple.
pub fn check_n_convexity<T, F>(
    f: &F,
    iv: &Interval<T>,
    order: usize,
    samples: usize,
    seed: u64,
) -> Result<ConvexityReport>
where
    T: Scalar,
    F: Integrand<T> + ?Sized,
{
    if order == 0 {
        return Err(QuadError::InvalidArgument("convexity order must be at least 1".to_string()));
    }
    if samples == 0 {
        return Err(QuadError::InvalidArgument("at least one sample is required".to_string()));
    }
    let width = order + 2;
    let scale = T::from_i64(ZERO_TOLERANCE_ULPS) * T::unit_roundoff();
    let mut tally = Tally::new();
    for pts in sample_tuples(iv, width, samples, seed) {
        let values = pts.iter().map(|x| eval_checked(f, x)).collect::<Result<Vec<T>>>()?;
        let dd = divided_difference(&pts, &values)?;
        let max_abs = values.iter().fold(T::zero(), |m, v| m.max_of(v.abs()));
        let min_gap = pts
            .windows(2)
            .map(|w| w[1].clone() - w[0].clone())
            .reduce(|a, b| a.min_of(b))
            .expect("tuples have at least three points");
        let tolerance = scale.clone() * max_abs / min_gap.powi(order as i64 + 1);
        tally.record(&dd, &tolerance, || pts.iter().map(Scalar::to_f64).collect());
    }
    Ok(tally.finish(Evidence::DividedDifferences, order, samples))
}

/// Signs of the symbolic sixth derivative on `grid + 1` equispaced points.
///
/// A non-negative sixth derivative is sufficient for 5-convexity.
pub fn sixth_derivative_sign<T: Scalar>(e: &ExprNode, iv: &Interval<T>, grid: usize) -> Result<ConvexityReport> {
    derivative_sign(e, iv, 6, grid)
}

/// Signs of the derivative of order `derivative_order` on `grid + 1` points.
pub fn derivative_sign<T: Scalar>(
    e: &ExprNode,
    iv: &Interval<T>,
    derivative_order: usize,
    grid: usize,
) -> Result<ConvexityReport> {
    if grid == 0 || derivative_order == 0 {
        return Err(QuadError::InvalidArgument("grid and derivative order must be positive".to_string()));
    }
    let d = differentiate_n(e, derivative_order)?;
    let compiled = d.compile::<T>();
    let xs: Vec<T> = (0..=grid).map(|k| iv.partition_point(k, grid)).collect();
    let values = xs.iter().map(|x| eval_checked(&compiled, x)).collect::<Result<Vec<T>>>()?;
    let max_abs = values.iter().fold(T::zero(), |m, v| m.max_of(v.abs()));
    let tolerance = T::from_i64(ZERO_TOLERANCE_ULPS) * T::unit_roundoff() * max_abs;
    let mut tally = Tally::new();
    for (x, v) in xs.iter().zip(&values) {
        tally.record(v, &tolerance, || vec![x.to_f64()]);
    }
    Ok(tally.finish(Evidence::Derivative, derivative_order - 1, grid + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn slope_and_monomials() {
        assert_eq!(divided_difference(&[0.0, 1.0], &[0.0, 1.0]).unwrap(), 1.0);
        let pts = [0.0, 1.0, 2.0, 3.0];
        let cubes: Vec<f64> = pts.iter().map(|x: &f64| x.powi(3)).collect();
        assert_eq!(divided_difference(&pts, &cubes).unwrap(), 1.0);
        let squares: Vec<f64> = pts.iter().map(|x: &f64| x.powi(2)).collect();
        assert_eq!(divided_difference(&pts, &squares).unwrap(), 0.0);
    }

    #[test]
    fn table_entries_follow_recursion() {
        let pts = vec![0.0, 0.5, 2.0, 3.0];
        let vals: Vec<f64> = pts.iter().map(|x: &f64| x.exp()).collect();
        let t = DividedDifferenceTable::new(pts.clone(), vals.clone()).unwrap();
        assert_eq!(t.order(), 3);
        assert_eq!(t.entry(0, 2), Some(&vals[2]));
        let d = (t.entry(1, 2).unwrap() - t.entry(1, 1).unwrap()) / (pts[3] - pts[1]);
        assert_eq!(t.entry(2, 1), Some(&d));
        assert!(t.entry(4, 0).is_none());
    }

    #[test]
    fn rejects_bad_points() {
        assert!(divided_difference(&[0.0, 0.0], &[1.0, 2.0]).is_err());
        assert!(divided_difference(&[1.0, 0.0], &[1.0, 2.0]).is_err());
        assert!(divided_difference(&[0.0, 1.0], &[1.0]).is_err());
        assert!(divided_difference::<f64>(&[], &[]).is_err());
    }

    #[test]
    fn sampled_verdicts() {
        let iv = Interval::from_f64(-1.0, 1.0).unwrap();
        let r = check_n_convexity(&|x: &f64| x.powi(6), &iv, 5, 200, 1).unwrap();
        assert_eq!(r.verdict, Verdict::ConsistentWithConvex);
        assert_eq!(r.samples_tested, 200);

        let plus = parse("plus(x-0.6)^7").unwrap().compile::<f64>();
        let r = check_n_convexity(&plus, &iv, 5, 200, 1).unwrap();
        assert_eq!(r.verdict, Verdict::ConsistentWithConvex);
        assert!(r.near_zero > 0, "tuples left of the kink give exact zeros");

        let r = check_n_convexity(&|x: &f64| -x.exp(), &Interval::from_f64(0.0, 1.0).unwrap(), 5, 200, 1).unwrap();
        assert_eq!(r.verdict, Verdict::ConsistentWithConcave);
    }

    #[test]
    fn mixed_signs_are_violations() {
        // x^7 has sixth derivative 5040 x, changing sign at 0
        let iv = Interval::from_f64(-1.0, 1.0).unwrap();
        let r = check_n_convexity(&|x: &f64| x.powi(7), &iv, 5, 200, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.min_divided_difference < 0.0 && r.max_divided_difference > 0.0);
    }

    #[test]
    fn sampling_is_reproducible() {
        let iv = Interval::from_f64(0.0, 2.0).unwrap();
        let a = check_n_convexity(&|x: &f64| x.exp(), &iv, 3, 50, 9).unwrap();
        let b = check_n_convexity(&|x: &f64| x.exp(), &iv, 3, 50, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sixth_derivative_reports() {
        let r =
            sixth_derivative_sign(&parse("1/x").unwrap(), &Interval::<f64>::from_f64(1.0, 2.0).unwrap(), 1024).unwrap();
        assert_eq!(r.verdict, Verdict::ConsistentWithConvex);
        assert!((r.min_divided_difference - 5.625).abs() < 1e-12);
        assert_eq!(r.witness, vec![2.0]);
        assert_eq!(r.samples_tested, 1025);

        let r = sixth_derivative_sign(&parse("exp(x)").unwrap(), &Interval::<f64>::from_f64(0.0, 1.0).unwrap(), 1024)
            .unwrap();
        assert_eq!(r.verdict, Verdict::ConsistentWithConvex);
        assert_eq!(r.min_divided_difference, 1.0);
        assert_eq!(r.witness, vec![0.0]);

        let r = sixth_derivative_sign(&parse("x^5").unwrap(), &Interval::<f64>::from_f64(-1.0, 1.0).unwrap(), 1024)
            .unwrap();
        assert_eq!(r.verdict, Verdict::Indeterminate);
    }

    #[test]
    fn derivative_errors_propagate() {
        let iv = Interval::<f64>::from_f64(-1.0, 1.0).unwrap();
        assert!(sixth_derivative_sign(&parse("ln(x)").unwrap(), &iv, 16).is_err());
        assert!(sixth_derivative_sign(&parse("plus(x)^3").unwrap(), &iv, 16).is_err());
    }
}
