use super::{Exponent, ExprNode};
use crate::error::{DomainReason, EvalError};
use crate::rules::Integrand;
use crate::scalar::Scalar;

/// An expression with its constants converted to one scalar mode, ready for
/// repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledExpr<T> {
    root: Node<T>,
}

#[derive(Debug, Clone)]
enum Node<T> {
    Const(T),
    X,
    Add(Box<Node<T>>, Box<Node<T>>),
    Sub(Box<Node<T>>, Box<Node<T>>),
    Mul(Box<Node<T>>, Box<Node<T>>),
    Div(Box<Node<T>>, Box<Node<T>>),
    Neg(Box<Node<T>>),
    PowInt(Box<Node<T>>, i64),
    PowReal(Box<Node<T>>, T),
    Exp(Box<Node<T>>),
    Ln(Box<Node<T>>),
    Plus(Box<Node<T>>),
}

fn lower<T: Scalar>(e: &ExprNode) -> Node<T> {
    let b = |e: &ExprNode| Box::new(lower::<T>(e));
    match e {
        ExprNode::Const(c) => Node::Const(T::from_ratio(c)),
        ExprNode::X => Node::X,
        ExprNode::Add(l, r) => Node::Add(b(l), b(r)),
        ExprNode::Sub(l, r) => Node::Sub(b(l), b(r)),
        ExprNode::Mul(l, r) => Node::Mul(b(l), b(r)),
        ExprNode::Div(l, r) => Node::Div(b(l), b(r)),
        ExprNode::Neg(a) => Node::Neg(b(a)),
        ExprNode::Pow(a, Exponent::Int(k)) => Node::PowInt(b(a), *k),
        ExprNode::Pow(a, Exponent::Real(r)) => Node::PowReal(b(a), T::from_ratio(r)),
        ExprNode::Exp(a) => Node::Exp(b(a)),
        ExprNode::Ln(a) => Node::Ln(b(a)),
        ExprNode::Plus(a) => Node::Plus(b(a)),
    }
}

impl<T: Scalar> Node<T> {
    fn eval(&self, x: &T) -> Result<T, EvalError> {
        let fail = |reason| EvalError::new(x.to_f64(), reason);
        Ok(match self {
            Node::Const(c) => c.clone(),
            Node::X => x.clone(),
            Node::Add(l, r) => l.eval(x)? + r.eval(x)?,
            Node::Sub(l, r) => l.eval(x)? - r.eval(x)?,
            Node::Mul(l, r) => l.eval(x)? * r.eval(x)?,
            Node::Div(l, r) => {
                let num = l.eval(x)?;
                let den = r.eval(x)?;
                if den.is_zero() {
                    return Err(fail(DomainReason::DivisionByZero));
                }
                num / den
            }
            Node::Neg(a) => -a.eval(x)?,
            Node::PowInt(a, k) => {
                let base = a.eval(x)?;
                if *k < 0 && base.is_zero() {
                    return Err(fail(DomainReason::DivisionByZero));
                }
                base.powi(*k)
            }
            Node::PowReal(a, r) => {
                let base = a.eval(x)?;
                if base > T::zero() {
                    (r.clone() * base.ln()).exp()
                } else if base.is_zero() && *r > T::zero() {
                    T::zero()
                } else if base.is_zero() {
                    return Err(fail(DomainReason::DivisionByZero));
                } else {
                    return Err(fail(DomainReason::NegativeBase));
                }
            }
            Node::Exp(a) => a.eval(x)?.exp(),
            Node::Ln(a) => {
                let v = a.eval(x)?;
                if !(v > T::zero()) {
                    return Err(fail(DomainReason::LogOfNonPositive));
                }
                v.ln()
            }
            Node::Plus(a) => {
                let v = a.eval(x)?;
                if v > T::zero() {
                    v
                } else {
                    T::zero()
                }
            }
        })
    }
}

impl<T: Scalar> CompiledExpr<T> {
    pub fn new(e: &ExprNode) -> Self {
        CompiledExpr { root: lower(e) }
    }

    pub fn eval(&self, x: &T) -> Result<T, EvalError> {
        self.root.eval(x)
    }
}

impl<T: Scalar> Integrand<T> for CompiledExpr<T> {
    fn eval(&self, x: &T) -> Result<T, EvalError> {
        self.root.eval(x)
    }
}

impl ExprNode {
    pub fn compile<T: Scalar>(&self) -> CompiledExpr<T> {
        CompiledExpr::new(self)
    }
}

/// One-off evaluation; compile once with [`ExprNode::compile`] for repeated use.
pub fn evaluate<T: Scalar>(e: &ExprNode, x: &T) -> Result<T, EvalError> {
    lower::<T>(e).eval(x)
}
