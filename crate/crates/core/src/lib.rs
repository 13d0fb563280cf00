//! Adaptive numerical integration for 5-convex and 5-concave integrands.
//!
//! The method blends three-point Gauss (`G`) and four-point Lobatto (`L`)
//! quadrature as `Q = 3/4 G + 1/4 L` on `n` equal subintervals and stops once
//! `|L_n - G_n| <= 4 eps`, which bounds the error of `Q_n` by `eps` for
//! integrands whose sixth derivative keeps one sign. A Simpson/Chebyshev
//! method for 3-convex integrands is included as a baseline.
//!
//! ```
//! use quintiq::{integrate_adaptive, Interval, SearchStrategy};
//!
//! let iv = Interval::from_f64(1.0, 2.0).unwrap();
//! let r = integrate_adaptive(&|x: &f64| 1.0 / x, &iv, &1e-8, SearchStrategy::LinearMinimal, 1000).unwrap();
//! assert_eq!(r.n_final, 4);
//! assert!((r.value - 2f64.ln()).abs() <= 1e-8);
//! ```

pub mod adaptive;
pub mod composite;
pub mod convexity;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod parallel;
pub mod rules;
pub mod scalar;

pub use adaptive::{
    integrate_adaptive, integrate_adaptive_cubic, integrate_with, is_resolvable, resolvable_gap, stopping_gap,
    AdaptiveOptions, AdaptiveResult, GapRecord, SearchStrategy, VerifyOptions, DEFAULT_N_MAX,
};
pub use composite::{
    apriori_bound, composite_pair, composite_pair_with, composite_rule, composite_rule_with,
    estimate_sixth_derivative_bound, min_n_for_bound, CompositePair, SixthDerivativeEstimate, DEFAULT_M6_SAMPLES,
};
pub use convexity::{
    check_n_convexity, divided_difference, sixth_derivative_sign, ConvexityReport, DividedDifferenceTable, Verdict,
};
pub use error::{DomainReason, EvalError, QuadError};
pub use expr::{differentiate, evaluate, parse, CompiledExpr, ExprNode};
pub use parallel::Execution;
pub use rules::{apply_rule, blend_q, rule_table, Integrand, Interval, Method, RuleId, RuleTable};
pub use scalar::{DoubleDouble, Mp, Scalar};
