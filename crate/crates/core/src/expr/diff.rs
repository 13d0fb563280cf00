use thiserror::Error;

use super::{Exponent, ExprNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("not differentiable: {0}")]
    NotDifferentiable(String),
}

/// Symbolic derivative with respect to x.
///
/// Plus-powers follow `d/dx plus(u)^k = k plus(u)^(k-1) u'` for `k >= 2`; a
/// bare `plus(u)` (exponent 1) has a kink and is rejected, as are non-integer
/// exponents.
pub fn differentiate(e: &ExprNode) -> Result<ExprNode, DiffError> {
    use ExprNode as E;
    Ok(match e {
        E::Const(_) => E::int(0),
        E::X => E::int(1),
        E::Add(u, v) => E::add(differentiate(u)?, differentiate(v)?),
        E::Sub(u, v) => E::sub(differentiate(u)?, differentiate(v)?),
        E::Mul(u, v) => match (u.as_const(), v.as_const()) {
            (Some(_), _) => E::mul((**u).clone(), differentiate(v)?),
            (_, Some(_)) => E::mul(differentiate(u)?, (**v).clone()),
            _ => E::add(E::mul(differentiate(u)?, (**v).clone()), E::mul((**u).clone(), differentiate(v)?)),
        },
        E::Div(u, v) => {
            if v.as_const().is_some() {
                E::div(differentiate(u)?, (**v).clone())
            } else {
                let v_sq = E::pow((**v).clone(), Exponent::Int(2));
                let dv = differentiate(v)?;
                if u.as_const().is_some() {
                    E::neg(E::div(E::mul((**u).clone(), dv), v_sq))
                } else {
                    let num = E::sub(E::mul(differentiate(u)?, (**v).clone()), E::mul((**u).clone(), dv));
                    E::div(num, v_sq)
                }
            }
        }
        E::Neg(u) => E::neg(differentiate(u)?),
        E::Pow(base, Exponent::Int(k)) => {
            let k = *k;
            if let E::Plus(arg) = &**base {
                if k < 2 {
                    return Err(DiffError::NotDifferentiable(format!(
                        "plus-power with exponent {k} has a kink at the root of {arg}"
                    )));
                }
            }
            if k == 0 {
                E::int(0)
            } else {
                let outer = E::mul(E::int(k), E::pow((**base).clone(), Exponent::Int(k - 1)));
                let inner = match &**base {
                    E::Plus(arg) => differentiate(arg)?,
                    other => differentiate(other)?,
                };
                E::mul(outer, inner)
            }
        }
        E::Pow(_, Exponent::Real(r)) => {
            return Err(DiffError::NotDifferentiable(format!("non-integer exponent {r}")));
        }
        E::Exp(u) => E::mul(E::exp((**u).clone()), differentiate(u)?),
        E::Ln(u) => E::div(differentiate(u)?, (**u).clone()),
        E::Plus(u) => {
            return Err(DiffError::NotDifferentiable(format!("plus({u}) has a kink")));
        }
    })
}

/// The `order`-th derivative.
pub fn differentiate_n(e: &ExprNode, order: usize) -> Result<ExprNode, DiffError> {
    let mut d = e.clone();
    for _ in 0..order {
        d = differentiate(&d)?;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, parse};

    #[test]
    fn sixth_derivative_of_plus_power() {
        let d6 = differentiate_n(&parse("plus(x-0.6)^7").unwrap(), 6).unwrap();
        assert_eq!(d6, parse("5040*plus(x-0.6)").unwrap());
        assert_eq!(d6.to_string(), "(5040 * plus((x - 0.6)))");
        assert!(differentiate(&d6).is_err());
    }

    #[test]
    fn exp_is_its_own_derivative() {
        assert_eq!(differentiate(&parse("exp(x)").unwrap()).unwrap(), parse("exp(x)").unwrap());
    }

    #[test]
    fn sixth_derivative_of_reciprocal() {
        let d6 = differentiate_n(&parse("1/x").unwrap(), 6).unwrap();
        assert_eq!(evaluate(&d6, &1.0).unwrap(), 720.0);
        let v = evaluate(&d6, &2.0).unwrap();
        assert!((v - 720.0 / 128.0).abs() < 1e-12);
        assert!(d6.size() < 1000, "size {}", d6.size());
    }

    #[test]
    fn polynomial_derivatives_vanish() {
        let d6 = differentiate_n(&parse("x^5 - 3*x^2 + 1").unwrap(), 6).unwrap();
        assert_eq!(d6, ExprNode::int(0));
        let d6 = differentiate_n(&parse("x^6").unwrap(), 6).unwrap();
        assert_eq!(d6, ExprNode::int(720));
    }

    #[test]
    fn rejects_kinks_and_real_exponents() {
        assert!(matches!(differentiate(&parse("plus(x)").unwrap()), Err(DiffError::NotDifferentiable(_))));
        assert!(differentiate(&parse("plus(x-1)^1").unwrap()).is_err());
        assert!(differentiate(&parse("x^0.5").unwrap()).is_err());
        assert!(differentiate(&parse("plus(x)^2").unwrap()).is_ok());
    }

    #[test]
    fn quotient_and_log_rules() {
        let d = differentiate(&parse("ln(x)").unwrap()).unwrap();
        assert_eq!(evaluate(&d, &4.0).unwrap(), 0.25);
        let d = differentiate(&parse("x/(x+1)").unwrap()).unwrap();
        assert!((evaluate(&d, &1.0).unwrap() - 0.25).abs() < 1e-15);
        let d = differentiate(&parse("exp(2*x)").unwrap()).unwrap();
        assert!((evaluate(&d, &0.0).unwrap() - 2.0).abs() < 1e-15);
    }
}
