use num_rational::BigRational;
use serde::Serialize;

use quintiq::convexity::derivative_sign;
use quintiq::expr::ExprNode;
use quintiq::parallel::{map_items, Execution};
use quintiq::scalar::{parse_decimal, set_default_mp_digits, Scalar};
use quintiq::{
    check_n_convexity, composite_pair_with, integrate_with, is_resolvable, resolvable_gap, AdaptiveOptions,
    ConvexityReport, Integrand, Interval, Method, QuadError, VerifyOptions,
};

use crate::config::{CommandKind, MethodArg, Precision, RunConfig, StrategyArg};
use crate::error::CliError;

/// Runs `$body` with `$t` bound to the scalar type of `$precision`.
macro_rules! with_scalar {
    ($precision:expr, $t:ident => $body:expr) => {
        match $precision {
            Precision::Double => {
                type $t = f64;
                $body
            }
            Precision::DoubleDouble => {
                type $t = quintiq::DoubleDouble;
                $body
            }
            Precision::Mp(digits) => {
                set_default_mp_digits(digits);
                type $t = quintiq::Mp;
                $body
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub n: usize,
    pub gap: String,
}

/// An adaptive result rendered at full working precision. Reals are decimal
/// strings so the payload does not depend on the scalar mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrateReport {
    pub method: MethodArg,
    pub value: String,
    pub n_final: usize,
    pub gap_final: String,
    /// `gap_final / 4`; bounds the error when the integrand is in the method's convexity class.
    pub error_bound: String,
    pub epsilon: String,
    pub evaluations: usize,
    pub history: Vec<HistoryEntry>,
    pub precision: Precision,
    pub strategy: StrategyArg,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convexity: Option<ConvexityReport>,
    pub config: RunConfig,
}

pub fn parse_integrand(text: &str) -> Result<ExprNode, CliError> {
    quintiq::parse(text).map_err(|error| CliError::Parse { text: text.to_string(), error })
}

fn interval<T: Scalar>(a: &BigRational, b: &BigRational) -> Result<Interval<T>, CliError> {
    Ok(Interval::new(T::from_ratio(a), T::from_ratio(b))?)
}

/// Refuses a tolerance whose stopping test would be decided by roundoff.
/// The integral's magnitude is taken from the one-subinterval rules.
fn ensure_resolvable<T, F>(
    method: Method,
    f: &F,
    iv: &Interval<T>,
    eps: &T,
    precision: Precision,
) -> Result<(), CliError>
where
    T: Scalar,
    F: Integrand<T> + ?Sized,
{
    let first = composite_pair_with(method, f, iv, 1, Execution::Sequential)?;
    let scale = first.g_n.abs().max_of(first.l_n.abs());
    if is_resolvable(eps, &scale) {
        return Ok(());
    }
    let floor = resolvable_gap(&scale) / T::from_i64(4);
    let shown = match floor.to_f64() {
        f if f.is_finite() => format!("{f:.1e}"),
        _ => floor.to_decimal_string(),
    };
    Err(CliError::BelowFloor { eps: eps.to_decimal_string(), floor: shown, precision })
}

fn integrate_in<T: Scalar>(config: &RunConfig, expr: &ExprNode) -> Result<IntegrateReport, CliError> {
    let problem = config.problem()?;
    let eps_ratio = problem.eps.as_ref().ok_or_else(|| CliError::Usage("--eps is required".to_string()))?;
    let iv = interval::<T>(&problem.a, &problem.b)?;
    let eps = T::from_ratio(eps_ratio);
    let f = expr.compile::<T>();
    let method = Method::from(config.method);
    ensure_resolvable(method, &f, &iv, &eps, config.precision)?;
    let opts = AdaptiveOptions {
        strategy: config.strategy.into(),
        n_max: config.n_max,
        execution: Execution::Parallel,
        verify: config.verify.then(VerifyOptions::default),
    };
    let r = integrate_with(method, &f, &iv, &eps, &opts)?;
    Ok(IntegrateReport {
        method: config.method,
        value: r.value.to_decimal_string(),
        n_final: r.n_final,
        gap_final: r.gap_final.to_decimal_string(),
        error_bound: r.error_bound().to_decimal_string(),
        epsilon: r.epsilon.to_decimal_string(),
        evaluations: r.evaluations,
        history: r.history.iter().map(|h| HistoryEntry { n: h.n, gap: h.gap.to_decimal_string() }).collect(),
        precision: config.precision,
        strategy: config.strategy,
        convexity: r.convexity,
        config: config.clone(),
    })
}

/// `integrate`: adaptive integration of `config.fn_text` over `[a, b]`.
pub fn run_integrate(config: &RunConfig) -> Result<IntegrateReport, CliError> {
    if config.command != CommandKind::Integrate {
        return Err(CliError::Usage("run_integrate needs an integrate config".to_string()));
    }
    let expr = parse_integrand(&config.fn_text)?;
    with_scalar!(config.precision, T => integrate_in::<T>(config, &expr))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    #[serde(rename = "fn")]
    pub fn_text: String,
    pub order: usize,
    pub precision: Precision,
    /// Divided differences of `order + 1` over sampled point tuples.
    pub sampled: ConvexityReport,
    /// Sign scan of the symbolic derivative of order `order + 1`.
    pub derivative: Option<ConvexityReport>,
    /// Why the derivative scan was not possible, if it was not.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivative_unavailable: Option<String>,
}

fn check_in<T: Scalar>(config: &RunConfig, expr: &ExprNode) -> Result<CheckReport, CliError> {
    let problem = config.problem()?;
    let options = config.check.ok_or_else(|| CliError::Usage("missing check options".to_string()))?;
    let iv = interval::<T>(&problem.a, &problem.b)?;
    let f = expr.compile::<T>();
    let sampled = check_n_convexity(&f, &iv, options.order, options.samples, options.seed)?;
    let (derivative, derivative_unavailable) = match derivative_sign(expr, &iv, options.order + 1, options.grid) {
        Ok(report) => (Some(report), None),
        Err(QuadError::NotDifferentiable(e)) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    Ok(CheckReport {
        fn_text: config.fn_text.clone(),
        order: options.order,
        precision: config.precision,
        sampled,
        derivative,
        derivative_unavailable,
    })
}

/// `check`: sampled divided differences plus a symbolic derivative scan.
pub fn run_check(config: &RunConfig) -> Result<CheckReport, CliError> {
    let expr = parse_integrand(&config.fn_text)?;
    with_scalar!(config.precision, T => check_in::<T>(config, &expr))
}

pub const SKIPPED_MARKER: &str = "requires extended precision";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentRow {
    /// The tolerance (experiment 1) or right endpoint (experiment 2).
    pub label: String,
    pub n_quintic: Option<usize>,
    pub n_cubic: Option<usize>,
    /// Set instead of the counts when the active precision cannot decide the row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentTable {
    pub experiment: CommandKind,
    pub label_header: &'static str,
    pub precision: Precision,
    pub strategy: StrategyArg,
    pub rows: Vec<ExperimentRow>,
}

struct Case {
    label: String,
    a: i64,
    b: i64,
    eps_exponent: i32,
}

/// Both methods on one row. Rows run concurrently; subintervals within a row
/// are summed sequentially.
fn experiment_row<T, F>(
    case: &Case,
    f: &F,
    precision: Precision,
    strategy: StrategyArg,
    n_max: usize,
) -> Result<ExperimentRow, CliError>
where
    T: Scalar,
    F: Integrand<T>,
{
    let iv = Interval::new(T::from_i64(case.a), T::from_i64(case.b))?;
    let eps: T = parse_decimal(&format!("1e-{}", case.eps_exponent)).expect("decimal literal");
    let opts = AdaptiveOptions { strategy: strategy.into(), n_max, ..AdaptiveOptions::default() };
    let mut counts = [None, None];
    for (slot, method) in counts.iter_mut().zip([Method::Quintic, Method::Cubic]) {
        match ensure_resolvable(method, f, &iv, &eps, precision) {
            Ok(()) => {}
            Err(CliError::BelowFloor { .. }) => {
                return Ok(ExperimentRow {
                    label: case.label.clone(),
                    n_quintic: None,
                    n_cubic: None,
                    skipped: Some(SKIPPED_MARKER.to_string()),
                })
            }
            Err(e) => return Err(e),
        }
        *slot = Some(integrate_with(method, f, &iv, &eps, &opts)?.n_final);
    }
    Ok(ExperimentRow { label: case.label.clone(), n_quintic: counts[0], n_cubic: counts[1], skipped: None })
}

fn run_cases<T, F>(
    cases: &[Case],
    f: &F,
    precision: Precision,
    strategy: StrategyArg,
    n_max: usize,
) -> Result<Vec<ExperimentRow>, CliError>
where
    T: Scalar,
    F: Integrand<T>,
{
    map_items(Execution::Parallel, cases, |case| experiment_row::<T, F>(case, f, precision, strategy, n_max))
        .into_iter()
        .collect()
}

fn reciprocal<T: Scalar>(x: &T) -> T {
    T::one() / x.clone()
}

fn exponential<T: Scalar>(x: &T) -> T {
    x.exp()
}

/// Subdivisions for the integral of 1/x over [1, 2] at eps = 1e-1 .. 1e-16.
pub fn run_experiment1(precision: Precision, strategy: StrategyArg, n_max: usize) -> Result<ExperimentTable, CliError> {
    let cases: Vec<Case> = (1..=16).map(|k| Case { label: format!("1e-{k}"), a: 1, b: 2, eps_exponent: k }).collect();
    let rows = with_scalar!(precision, T => run_cases::<T, _>(&cases, &reciprocal::<T>, precision, strategy, n_max))?;
    Ok(ExperimentTable { experiment: CommandKind::Experiment1, label_header: "epsilon", precision, strategy, rows })
}

/// Subdivisions for the integral of exp(x) over [0, b], b = 1 .. 10, at eps = 1e-8.
pub fn run_experiment2(precision: Precision, strategy: StrategyArg, n_max: usize) -> Result<ExperimentTable, CliError> {
    let cases: Vec<Case> = (1..=10).map(|b| Case { label: b.to_string(), a: 0, b, eps_exponent: 8 }).collect();
    let rows = with_scalar!(precision, T => run_cases::<T, _>(&cases, &exponential::<T>, precision, strategy, n_max))?;
    Ok(ExperimentTable { experiment: CommandKind::Experiment2, label_header: "b", precision, strategy, rows })
}
