use quintiq::corpus::{Curvature, Reference, ReferenceId, REFERENCES};
use quintiq::parallel::Execution;
use quintiq::scalar::Scalar;
use quintiq::{
    apriori_bound, composite_pair, composite_pair_with, composite_rule, integrate_adaptive, integrate_adaptive_cubic,
    min_n_for_bound, stopping_gap, DoubleDouble, Interval, Method, RuleId, SearchStrategy,
};

type D = DoubleDouble;

fn d(x: f64) -> D {
    D::from(x)
}

/// Allowance for summation roundoff over `n` subintervals.
fn roundoff(n: usize, scale: D) -> D {
    d(64.0 * n as f64) * D::unit_roundoff() * D::one().max_of(scale.abs())
}

fn reference(id: ReferenceId) -> Reference {
    *REFERENCES.iter().find(|r| r.id == id).unwrap()
}

#[test]
fn blended_error_is_within_a_quarter_gap() {
    let mut checked = 0;
    for r in REFERENCES {
        let f = r.compile::<D>();
        let iv = r.interval::<D>();
        let exact: D = r.integral();
        for n in 1..=32 {
            let p = composite_pair(&f, &iv, n).unwrap();
            let err = (exact - p.q_n).abs();
            let bound = p.gap() / d(4.0) + roundoff(n, exact);
            assert!(err <= bound, "{} n={n}: |I - Q| = {err} > {bound}", r.text);
            checked += 1;
        }
    }
    assert_eq!(checked, 12 * 32);
}

#[test]
fn gauss_and_lobatto_bracket_the_integral() {
    for r in REFERENCES {
        let f = r.compile::<D>();
        let iv = r.interval::<D>();
        let exact: D = r.integral();
        for n in 1..=32 {
            let p = composite_pair(&f, &iv, n).unwrap();
            let mid = (p.g_n + p.l_n) / d(2.0);
            let slack = roundoff(n, exact);
            let (lo, hi) = match r.curvature {
                Curvature::Convex => (p.g_n, mid),
                Curvature::Concave => (mid, p.g_n),
            };
            assert!(lo <= exact + slack && exact <= hi + slack, "{} n={n}: {lo} <= {exact} <= {hi}", r.text);
        }
    }
}

#[test]
fn plus_power_pair_straddles_the_blend() {
    let f = reference(ReferenceId::PlusPowerSix);
    let g = reference(ReferenceId::PlusPowerSeven);
    let pf = composite_pair(&f.compile::<D>(), &f.interval(), 1).unwrap();
    let pg = composite_pair(&g.compile::<D>(), &g.interval(), 1).unwrap();
    let (if_, ig): (D, D) = (f.integral(), g.integral());
    assert!(if_ > pf.q_n);
    assert!(ig < pg.q_n);
    assert_eq!(format!("{:.1e}", pf.q_n.to_f64()), "7.0e-5");
    assert_eq!(format!("{:.1e}", pg.q_n.to_f64()), "9.1e-6");
}

#[test]
fn gap_shrinks_by_four_orders_by_n_32() {
    for r in REFERENCES.iter().filter(|r| r.smooth) {
        let f = r.compile::<D>();
        let iv = r.interval::<D>();
        let g1 = stopping_gap(&f, &iv, 1).unwrap();
        let g32 = stopping_gap(&f, &iv, 32).unwrap();
        assert!(g32 * d(1e4) <= g1, "{}: {g1} -> {g32}", r.text);
    }
}

fn observed_order(errors: (D, D)) -> f64 {
    (errors.0 / errors.1).to_f64().log2()
}

#[test]
fn gauss_and_lobatto_converge_at_sixth_order() {
    // 1/x and ln have a sixth derivative varying by 2^7 and 3^6 over their
    // intervals; the first halvings are pre-asymptotic (orders 5.2 and 4.7).
    let cases =
        [(ReferenceId::ExpUnit, 1), (ReferenceId::ExpDecay, 1), (ReferenceId::Reciprocal, 2), (ReferenceId::Log, 4)];
    for (id, first_n) in cases {
        let r = reference(id);
        let f = r.compile::<D>();
        let iv = r.interval::<D>();
        let exact: D = r.integral();
        for rule in [RuleId::Gauss3, RuleId::Lobatto4] {
            for n in [1, 2, 4, 8].into_iter().filter(|&n| n >= first_n) {
                let e1 = (composite_rule(rule, &f, &iv, n).unwrap() - exact).abs();
                let e2 = (composite_rule(rule, &f, &iv, 2 * n).unwrap() - exact).abs();
                let order = observed_order((e1, e2));
                assert!((5.5..=6.5).contains(&order), "{} {rule:?} n={n}: order {order}", r.text);
            }
        }
    }
}

#[test]
fn errors_respect_the_a_priori_bounds() {
    for r in REFERENCES {
        let f = r.compile::<D>();
        let iv = r.interval::<D>();
        let exact: D = r.integral();
        let m6: D = r.sixth_derivative_bound();
        for n in [1, 2, 3, 5, 8, 13, 21, 32] {
            for rule in [RuleId::Gauss3, RuleId::Lobatto4] {
                let err = (composite_rule(rule, &f, &iv, n).unwrap() - exact).abs();
                let bound = apriori_bound(rule, &iv, n, &m6).unwrap() + roundoff(n, exact);
                assert!(err <= bound, "{} {rule:?} n={n}: {err} > {bound}", r.text);
            }
        }
    }
}

#[test]
fn fused_pair_matches_separate_rules() {
    for r in REFERENCES {
        let f = r.compile::<f64>();
        let iv = r.interval::<f64>();
        for n in [1, 2, 7, 64, 100] {
            let p = composite_pair(&f, &iv, n).unwrap();
            let g = composite_rule(RuleId::Gauss3, &f, &iv, n).unwrap();
            let l = composite_rule(RuleId::Lobatto4, &f, &iv, n).unwrap();
            let ulp = |x: f64| 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE);
            assert!((p.g_n - g).abs() <= ulp(g), "{} n={n}", r.text);
            assert!((p.l_n - l).abs() <= ulp(l), "{} n={n}", r.text);
            // per-subinterval blend vs blend of totals: 2 ulps, plus summation
            // error growing with n
            let q_totals = (3.0 * p.g_n + p.l_n) / 4.0;
            let tol = (2 * n) as f64 * f64::EPSILON * p.g_n.abs().max(p.l_n.abs());
            assert!((p.q_n - q_totals).abs() <= tol, "{} n={n}", r.text);
            assert_eq!(p.evaluations, 6 * n + 1);
        }
    }
}

#[test]
fn parallel_pairs_are_bit_identical() {
    for r in REFERENCES {
        let f = r.compile::<D>();
        let iv = r.interval::<D>();
        for method in [Method::Quintic, Method::Cubic] {
            for n in [1, 63, 64, 65, 257, 1000] {
                let seq = composite_pair_with(method, &f, &iv, n, Execution::Sequential).unwrap();
                let par = composite_pair_with(method, &f, &iv, n, Execution::Parallel).unwrap();
                assert_eq!(seq, par, "{} {method:?} n={n}", r.text);
            }
        }
    }
}

#[test]
fn adaptive_value_meets_tolerance_on_the_corpus() {
    for r in REFERENCES {
        let f = r.compile::<D>();
        let iv = r.interval::<D>();
        let exact: D = r.integral();
        for k in 1..=12 {
            let eps = d(10f64.powi(-k));
            let res = integrate_adaptive(&f, &iv, &eps, SearchStrategy::LinearMinimal, 100_000).unwrap();
            assert!((res.value - exact).abs() <= eps, "{} eps=1e-{k}", r.text);
            assert!(res.gap_final <= d(4.0) * eps);
            if res.n_final > 1 {
                assert!(res.history[res.history.len() - 2].gap > d(4.0) * eps);
            }
        }
    }
}

#[test]
fn quintic_never_needs_more_subdivisions_than_cubic() {
    let one_over_x = reference(ReferenceId::Reciprocal);
    let f = one_over_x.compile::<D>();
    let iv = one_over_x.interval::<D>();
    for k in 1..=12 {
        let eps = d(10f64.powi(-k));
        let q = integrate_adaptive(&f, &iv, &eps, SearchStrategy::LinearMinimal, 10_000).unwrap();
        let c = integrate_adaptive_cubic(&f, &iv, &eps, SearchStrategy::LinearMinimal, 10_000).unwrap();
        assert!(q.n_final <= c.n_final, "eps=1e-{k}");
    }
}

#[test]
fn a_priori_count_exceeds_adaptive_count() {
    let iv = Interval::<D>::from_f64(1.0, 2.0).unwrap();
    let eps = d(1e-8);
    assert_eq!(min_n_for_bound(RuleId::Gauss3, &iv, &d(720.0), &eps).unwrap(), 6);
    assert_eq!(min_n_for_bound(RuleId::Gauss3, &iv, &d(720.0), &d(1.0)).unwrap(), 1);
    // 720 / (1512000 n^6) <= 1e-8  <=>  n^6 >= 47619.05
    assert_eq!(min_n_for_bound(RuleId::Lobatto4, &iv, &d(720.0), &eps).unwrap(), 7);
    let f = |x: &D| D::one() / *x;
    let res = integrate_adaptive(&f, &iv, &eps, SearchStrategy::LinearMinimal, 100).unwrap();
    assert_eq!(res.n_final, 4);
}

#[test]
fn strategies_agree_where_gaps_decrease() {
    let mut compared = 0;
    for r in REFERENCES {
        let f = r.compile::<D>();
        let iv = r.interval::<D>();
        for k in [2, 5, 8, 11] {
            let eps = d(10f64.powi(-k));
            let lin = integrate_adaptive(&f, &iv, &eps, SearchStrategy::LinearMinimal, 100_000).unwrap();
            let dbl = integrate_adaptive(&f, &iv, &eps, SearchStrategy::DoublingBisect, 100_000).unwrap();
            let monotone = lin.history.windows(2).all(|w| w[1].gap <= w[0].gap);
            if monotone {
                assert_eq!(lin.n_final, dbl.n_final, "{} eps=1e-{k}", r.text);
                compared += 1;
            } else if lin.n_final != dbl.n_final {
                eprintln!(
                    "{} eps=1e-{k}: non-monotone gaps, linear {} vs doubling {}",
                    r.text, lin.n_final, dbl.n_final
                );
            }
        }
    }
    assert!(compared > 0);
}
