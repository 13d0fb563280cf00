use std::fmt;

use thiserror::Error;

use crate::rules::RuleId;

/// Why an integrand could not produce a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainReason {
    LogOfNonPositive,
    DivisionByZero,
    /// Real power of a negative base.
    NegativeBase,
    NonFinite,
    Other(String),
}

impl fmt::Display for DomainReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainReason::LogOfNonPositive => f.write_str("logarithm of a non-positive number"),
            DomainReason::DivisionByZero => f.write_str("division by zero"),
            DomainReason::NegativeBase => f.write_str("non-integer power of a negative number"),
            DomainReason::NonFinite => f.write_str("non-finite value"),
            DomainReason::Other(msg) => f.write_str(msg),
        }
    }
}

/// Integrand evaluation failure at a given abscissa.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{reason} at x = {abscissa}")]
pub struct EvalError {
    pub abscissa: f64,
    pub reason: DomainReason,
}

impl EvalError {
    pub fn new(abscissa: f64, reason: DomainReason) -> Self {
        EvalError { abscissa, reason }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid interval [{a}, {b}]: endpoints must be finite with a < b")]
    InvalidInterval { a: String, b: String },

    #[error("number of subintervals must be at least 1")]
    ZeroSubintervals,

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("{0:?} has no sixth-order error bound")]
    UnsupportedRule(RuleId),

    #[error("integrand failed{}: {source}", subinterval.map(|k| format!(" in subinterval {k}")).unwrap_or_default())]
    Integrand {
        /// 1-based subinterval index for composite rules.
        subinterval: Option<usize>,
        source: EvalError,
    },

    #[error(transparent)]
    NotDifferentiable(#[from] crate::expr::DiffError),

    #[error("no n <= {n_max} met the stopping criterion; best gap {best_gap:e} at n = {best_n}")]
    BudgetExceeded { n_max: usize, best_n: usize, best_gap: f64 },
}

impl QuadError {
    pub(crate) fn in_subinterval(self, k: usize) -> Self {
        match self {
            QuadError::Integrand { source, .. } => QuadError::Integrand { subinterval: Some(k), source },
            other => other,
        }
    }
}

impl From<EvalError> for QuadError {
    fn from(source: EvalError) -> Self {
        QuadError::Integrand { subinterval: None, source }
    }
}

pub type Result<T, E = QuadError> = std::result::Result<T, E>;
