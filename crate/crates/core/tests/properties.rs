use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quintiq::corpus::REFERENCES;
use quintiq::error::EvalError;
use quintiq::expr::{differentiate_n, Exponent};
use quintiq::scalar::Scalar;
use quintiq::{
    apply_rule, check_n_convexity, divided_difference, evaluate, parse, DoubleDouble, ExprNode, Integrand, Interval,
    RuleId,
};

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Exact integral of the polynomial over [a, b] and the integral of the sum
/// of absolute terms, used as the error scale.
fn poly_integral(coeffs: &[f64], a: f64, b: f64) -> (f64, f64) {
    let ra = BigRational::from_float(a).unwrap();
    let rb = BigRational::from_float(b).unwrap();
    let mut exact = BigRational::from_integer(BigInt::from(0));
    let mut scale = 0.0;
    for (k, c) in coeffs.iter().enumerate() {
        let rc = BigRational::from_float(*c).unwrap();
        let p = (k + 1) as i32;
        let k1 = BigRational::from_integer(BigInt::from(k + 1));
        exact += rc * (num_traits::pow(rb.clone(), p as usize) - num_traits::pow(ra.clone(), p as usize)) / k1;
        // integral of |x|^k over [a, b]
        let abs_moment = if a >= 0.0 || b <= 0.0 {
            ((b.abs().powi(p) - a.abs().powi(p)) / p as f64).abs()
        } else {
            (b.powi(p) + (-a).powi(p)) / p as f64
        };
        scale += c.abs() * abs_moment;
    }
    (num_traits::ToPrimitive::to_f64(&exact).unwrap(), scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gauss_and_lobatto_integrate_quintics_exactly(
        coeffs in prop::collection::vec(-10.0f64..10.0, 6),
        a in -5.0f64..5.0,
        width in 0.1f64..10.0,
    ) {
        let b = a + width;
        let iv = Interval::from_f64(a, b).unwrap();
        let f = |x: &f64| poly(&coeffs, *x);
        let (exact, scale) = poly_integral(&coeffs, a, b);
        for rule in [RuleId::Gauss3, RuleId::Lobatto4] {
            let v = apply_rule(rule, &f, &iv).unwrap();
            prop_assert!((v - exact).abs() <= 1e-13 * scale, "{rule:?}: {v} vs {exact}");
        }
    }

    #[test]
    fn simpson_and_chebyshev_integrate_cubics_exactly(
        coeffs in prop::collection::vec(-10.0f64..10.0, 4),
        a in -5.0f64..5.0,
        width in 0.1f64..10.0,
    ) {
        let b = a + width;
        let iv = Interval::from_f64(a, b).unwrap();
        let f = |x: &f64| poly(&coeffs, *x);
        let (exact, scale) = poly_integral(&coeffs, a, b);
        for rule in [RuleId::Simpson, RuleId::Chebyshev3] {
            let v = apply_rule(rule, &f, &iv).unwrap();
            prop_assert!((v - exact).abs() <= 1e-13 * scale, "{rule:?}: {v} vs {exact}");
        }
    }

    #[test]
    fn rules_commute_with_affine_maps(k in 0usize..12, lo in 0.0f64..0.9, frac in 0.01f64..1.0) {
        let r = REFERENCES[k];
        let f = r.compile::<f64>();
        let (ra, rb) = (r.a as f64, r.b as f64);
        let a = ra + lo * (rb - ra);
        let b = a + frac * (rb - a);
        let iv = Interval::from_f64(a, b).unwrap();
        let mid = (a + b) / 2.0;
        let half = (b - a) / 2.0;
        let pulled = |t: &f64| f.eval(&(mid + half * t)).unwrap();
        let unit = Interval::from_f64(-1.0, 1.0).unwrap();
        // the mapped abscissae may differ by an ulp, amplified by |x f'(x)|
        let df = differentiate_n(&r.expr(), 1).unwrap().compile::<f64>();
        let scale = |t: &f64| {
            let x = mid + half * t;
            f.eval(&x).unwrap().abs() + (x * df.eval(&x).unwrap()).abs()
        };
        for rule in RuleId::ALL {
            let direct = apply_rule(rule, &f, &iv).unwrap();
            let via_unit = half * apply_rule(rule, &pulled, &unit).unwrap();
            let tol = 4.0 * f64::EPSILON * half * apply_rule(rule, &scale, &unit).unwrap();
            prop_assert!((direct - via_unit).abs() <= tol, "{} {rule:?} on [{a}, {b}]: {direct} vs {via_unit}", r.text);
        }
    }

    #[test]
    fn leading_divided_difference_of_a_monomial_is_one(
        m in 1usize..=8,
        start in -3.0f64..3.0,
        gaps in prop::collection::vec(0.01f64..1.0, 9),
    ) {
        let mut points = vec![start];
        for g in &gaps[..m] {
            points.push(points.last().unwrap() + g);
        }
        // extended precision: 1e-8 for every point set with gaps >= 1e-2
        let xs: Vec<DoubleDouble> = points.iter().map(|&x| DoubleDouble::from(x)).collect();
        let ys: Vec<DoubleDouble> = xs.iter().map(|x| x.powi(m as i64)).collect();
        let dd = divided_difference(&xs, &ys).unwrap();
        prop_assert!((dd - DoubleDouble::one()).abs().to_f64() <= 1e-8, "m={m}: {dd}");

        // doubles: bounded by the condition number sum |f_i| / prod |x_i - x_j|
        let values: Vec<f64> = points.iter().map(|x: &f64| f64::powi(*x, m as i32)).collect();
        let kappa: f64 = (0..=m)
            .map(|i| {
                let prod: f64 = (0..=m).filter(|&j| j != i).map(|j| (points[i] - points[j]).abs()).product();
                values[i].abs() / prod
            })
            .sum();
        let d = divided_difference(&points, &values).unwrap();
        let tol = 1e-8_f64.max(4.0 * (m * m) as f64 * f64::EPSILON * kappa);
        prop_assert!((d - 1.0).abs() <= tol, "m={m}: {d}, condition {kappa:e}");
    }

    #[test]
    fn negation_mirrors_convexity_reports(k in 0usize..12, seed in any::<u64>()) {
        let r = REFERENCES[k];
        let f = r.compile::<f64>();
        let iv = r.interval::<f64>();
        let neg = Negated(&f);
        let p = check_n_convexity(&f, &iv, 5, 64, seed).unwrap();
        let q = check_n_convexity(&neg, &iv, 5, 64, seed).unwrap();
        prop_assert_eq!(q.verdict, p.verdict.mirrored());
        prop_assert_eq!(q.min_divided_difference, -p.max_divided_difference);
        prop_assert_eq!(q.max_divided_difference, -p.min_divided_difference);
        prop_assert_eq!(&q.witness, &p.max_witness);
        prop_assert_eq!((q.positive, q.negative, q.near_zero), (p.negative, p.positive, p.near_zero));
    }

    #[test]
    fn printed_expressions_parse_back(e in expr_strategy(), seed in any::<u64>()) {
        let text = e.to_string();
        let back = parse(&text).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-4.0..4.0);
            match (evaluate(&e, &x), evaluate(&back, &x)) {
                (Ok(u), Ok(v)) if u.is_finite() && v.is_finite() => {
                    prop_assert!((u - v).abs() <= 2.0 * f64::EPSILON * u.abs(), "{text} at {x}: {u} vs {v}");
                }
                (Ok(u), Ok(v)) => prop_assert!(u.is_nan() && v.is_nan() || u == v, "{text} at {x}"),
                (Err(_), Err(_)) => {}
                (u, v) => prop_assert!(false, "{text} at {x}: {u:?} vs {v:?}"),
            }
        }
    }
}

struct Negated<'a, F>(&'a F);

impl<F: Integrand<f64>> Integrand<f64> for Negated<'_, F> {
    fn eval(&self, x: &f64) -> Result<f64, EvalError> {
        Ok(-self.0.eval(x)?)
    }
}

fn expr_strategy() -> impl Strategy<Value = ExprNode> {
    let leaf = prop_oneof![
        Just(ExprNode::x()),
        (-20i64..20, 1i64..8).prop_map(|(n, d)| ExprNode::constant(BigRational::new(n.into(), d.into()))),
        (-999i64..999).prop_map(|n| ExprNode::constant(BigRational::new(n.into(), 100.into()))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprNode::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprNode::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprNode::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprNode::div(a, b)),
            inner.clone().prop_map(ExprNode::neg),
            (inner.clone(), -3i64..5).prop_map(|(a, k)| ExprNode::pow(a, Exponent::Int(k))),
            inner.clone().prop_map(|a| ExprNode::exp(ExprNode::div(a, ExprNode::int(4)))),
            inner.clone().prop_map(ExprNode::ln),
            inner.prop_map(ExprNode::plus),
        ]
    })
}

/// Central differences of each derivative order against the next symbolic one.
/// Near roots of the derivative the quotient's truncation error `h^2/6 |f'''|`
/// dominates, so it is added to the relative tolerance.
#[test]
fn symbolic_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for r in REFERENCES {
        let e = r.expr();
        let kinks = e.plus_kinks();
        let derivs: Vec<Option<ExprNode>> = (0..=9).map(|k| differentiate_n(&e, k).ok()).collect();
        let at = |k: usize, x: f64| evaluate(derivs[k].as_ref().unwrap(), &x).unwrap();
        let (a, b) = (r.a as f64, r.b as f64);
        let margin = 1e-3 * (b - a);
        let mut tested = 0;
        while tested < 50 {
            let x: f64 = rng.gen_range(a + margin..b - margin);
            if kinks.iter().any(|k| (x - k).abs() < 1e-2) {
                continue;
            }
            let h = 1e-5 * x.abs().max(1.0);
            for k in (0..6).filter(|&k| derivs[k + 3].is_some()) {
                let fd = (at(k, x + h) - at(k, x - h)) / (2.0 * h);
                let exact = at(k + 1, x);
                let third = [x - h, x, x + h].iter().map(|&t| at(k + 3, t).abs()).fold(0.0, f64::max);
                let tol = 1e-6 * exact.abs() + 1.1 * h * h / 6.0 * third + 8.0 * f64::EPSILON * at(k, x).abs() / h;
                assert!((fd - exact).abs() <= tol, "{} order {} at {x}: fd {fd} vs {exact}", r.text, k + 1);
            }
            tested += 1;
        }
    }
}

#[test]
fn precedence_examples() {
    let at = |text: &str| evaluate(&parse(text).unwrap(), &0.0).unwrap();
    assert_eq!(at("1+2*3^2"), 19.0);
    assert_eq!(at("-2^2"), -4.0);
    assert_eq!(at("2^3^2"), 512.0);
    assert_eq!(parse("1/x").unwrap(), ExprNode::div(ExprNode::int(1), ExprNode::x()));
    let d6 = differentiate_n(&parse("1/x").unwrap(), 6).unwrap();
    assert_eq!(evaluate(&d6, &1.0).unwrap(), 720.0);
}
