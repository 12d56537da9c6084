//! Expression trees for quaternionic functions of one real variable.
//!
//! The node set is closed under differentiation, so `Ψ`, `Ψ'` and `Ψ''` are
//! all exact. Products keep their factor order: `(fg)' = f'g + fg'`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::linop::LinOp;
use crate::math;
use crate::quaternion::Quaternion;

#[derive(Debug, Clone, PartialEq)]
pub enum QExpr {
    Const(Quaternion),
    /// `x^m`.
    Monomial(u32),
    /// `e^{qx}`.
    Exp(Quaternion),
    Sum(Vec<QExpr>),
    /// `f(x)·g(x)`, order preserved.
    Prod(Arc<QExpr>, Arc<QExpr>),
    /// `c·f(x)`.
    LeftScale(Quaternion, Arc<QExpr>),
    /// `f(x)·c`.
    RightScale(Arc<QExpr>, Quaternion),
    /// Pointwise action of a constant real-linear operator.
    ApplyOp(LinOp, Arc<QExpr>),
}

impl QExpr {
    pub fn zero() -> Self {
        QExpr::Const(Quaternion::ZERO)
    }

    pub fn constant(c: Quaternion) -> Self {
        QExpr::Const(c)
    }

    pub fn monomial(m: u32) -> Self {
        QExpr::Monomial(m)
    }

    /// `x`.
    pub fn x() -> Self {
        QExpr::Monomial(1)
    }

    pub fn exp(q: Quaternion) -> Self {
        QExpr::Exp(q)
    }

    pub fn sum(terms: Vec<QExpr>) -> Self {
        let mut kept: Vec<QExpr> = terms.into_iter().filter(|t| !t.is_literal_zero()).collect();
        match kept.len() {
            0 => QExpr::zero(),
            1 => kept.pop().unwrap(),
            _ => QExpr::Sum(kept),
        }
    }

    pub fn prod(f: QExpr, g: QExpr) -> Self {
        if f.is_literal_zero() || g.is_literal_zero() {
            return QExpr::zero();
        }
        QExpr::Prod(Arc::new(f), Arc::new(g))
    }

    pub fn left_scale(c: Quaternion, f: QExpr) -> Self {
        if c == Quaternion::ZERO || f.is_literal_zero() {
            return QExpr::zero();
        }
        QExpr::LeftScale(c, Arc::new(f))
    }

    pub fn right_scale(f: QExpr, c: Quaternion) -> Self {
        if c == Quaternion::ZERO || f.is_literal_zero() {
            return QExpr::zero();
        }
        QExpr::RightScale(Arc::new(f), c)
    }

    pub fn apply_op(op: LinOp, f: QExpr) -> Self {
        if op == LinOp::ZERO || f.is_literal_zero() {
            return QExpr::zero();
        }
        QExpr::ApplyOp(op, Arc::new(f))
    }

    /// Polynomial `Σ x^m·c_m` from `(m, c_m)` pairs; coefficients sit on the right.
    pub fn polynomial(terms: &[(u32, Quaternion)]) -> Self {
        QExpr::sum(
            terms
                .iter()
                .map(|&(m, c)| QExpr::right_scale(QExpr::Monomial(m), c))
                .collect(),
        )
    }

    pub fn is_literal_zero(&self) -> bool {
        matches!(self, QExpr::Const(c) if *c == Quaternion::ZERO)
    }

    pub fn eval(&self, x: f64) -> Quaternion {
        match self {
            QExpr::Const(c) => *c,
            QExpr::Monomial(m) => Quaternion::real(math::powi(x, *m)),
            QExpr::Exp(q) => q.exp_qx(x),
            QExpr::Sum(terms) => terms.iter().map(|t| t.eval(x)).sum(),
            QExpr::Prod(f, g) => f.eval(x) * g.eval(x),
            QExpr::LeftScale(c, f) => *c * f.eval(x),
            QExpr::RightScale(f, c) => f.eval(x) * *c,
            QExpr::ApplyOp(a, f) => a.apply(f.eval(x)),
        }
    }

    /// Exact symbolic derivative with respect to `x`. Only literal zeros
    /// are simplified away.
    pub fn derivative(&self) -> QExpr {
        match self {
            QExpr::Const(_) | QExpr::Monomial(0) => QExpr::zero(),
            QExpr::Monomial(m) => {
                QExpr::right_scale(QExpr::Monomial(m - 1), Quaternion::real(*m as f64))
            }
            QExpr::Exp(q) => QExpr::left_scale(*q, QExpr::Exp(*q)),
            QExpr::Sum(terms) => QExpr::sum(terms.iter().map(QExpr::derivative).collect()),
            QExpr::Prod(f, g) => QExpr::sum(alloc::vec![
                QExpr::prod(f.derivative(), (**g).clone()),
                QExpr::prod((**f).clone(), g.derivative()),
            ]),
            QExpr::LeftScale(c, f) => QExpr::left_scale(*c, f.derivative()),
            QExpr::RightScale(f, c) => QExpr::right_scale(f.derivative(), *c),
            QExpr::ApplyOp(a, f) => QExpr::apply_op(*a, f.derivative()),
        }
    }

    /// Number of nodes, for tests and diagnostics.
    pub fn size(&self) -> usize {
        1 + match self {
            QExpr::Const(_) | QExpr::Monomial(_) | QExpr::Exp(_) => 0,
            QExpr::Sum(t) => t.iter().map(QExpr::size).sum(),
            QExpr::Prod(f, g) => f.size() + g.size(),
            QExpr::LeftScale(_, f) | QExpr::RightScale(f, _) | QExpr::ApplyOp(_, f) => f.size(),
        }
    }
}

/// Compact human-readable form. Operator nodes print as `M[…]`; their
/// matrices are not spelled out.
impl fmt::Display for QExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QExpr::Const(c) => write!(f, "({c})"),
            QExpr::Monomial(0) => f.write_str("1"),
            QExpr::Monomial(1) => f.write_str("x"),
            QExpr::Monomial(m) => write!(f, "x^{m}"),
            QExpr::Exp(q) => write!(f, "exp[({q})x]"),
            QExpr::Sum(terms) => {
                f.write_str("[")?;
                for (n, t) in terms.iter().enumerate() {
                    if n > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("]")
            }
            QExpr::Prod(a, b) => write!(f, "{a}·{b}"),
            QExpr::LeftScale(c, e) => write!(f, "({c})·{e}"),
            QExpr::RightScale(e, c) => write!(f, "{e}·({c})"),
            QExpr::ApplyOp(_, e) => write!(f, "M[{e}]"),
        }
    }
}

/// Value and first two derivatives of a function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: Quaternion,
    pub d1: Quaternion,
    pub d2: Quaternion,
}

/// A function together with its first two derivative trees.
#[derive(Debug, Clone)]
pub struct Differentiated {
    pub f: QExpr,
    pub d1: QExpr,
    pub d2: QExpr,
}

impl Differentiated {
    pub fn new(f: QExpr) -> Self {
        let d1 = f.derivative();
        let d2 = d1.derivative();
        Differentiated { f, d1, d2 }
    }

    pub fn jet(&self, x: f64) -> Jet {
        Jet {
            value: self.f.eval(x),
            d1: self.d1.eval(x),
            d2: self.d2.eval(x),
        }
    }
}

impl From<QExpr> for Differentiated {
    fn from(f: QExpr) -> Self {
        Differentiated::new(f)
    }
}
