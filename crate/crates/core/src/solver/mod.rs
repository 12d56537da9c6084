//! Analytic solvers for `Ψ'' = αΨ' + βΨ + ρ`.
//!
//! For constant coefficients `a, b` and a known exponential solution
//! `φ = e^{qx}` (so `q² = aq + b`), reduction of order gives the partner
//!
//! ```text
//! ξ(x) = e^{qx} ∫₀ˣ e^{−qt} e^{(a−q)t} dt.
//! ```
//!
//! The integrand `e^{ut}e^{vt}` obeys `f' = (L_u + R_v) f`. Writing
//! `A = L_u + R_v`, which is always a normal matrix (scalar plus skew part),
//! the integral resolves on ℝ⁴ as `A⁺(f(x) − 1) + x·P_ker(1)`. When `A` is
//! singular the kernel term is linear in `x`; in the complex case this is the
//! familiar repeated-root `x e^{qx}`, but for quaternions `2q ≠ a` does not
//! rule it out.

mod general;
mod variation;

pub use general::{fit_initial_conditions, solve_fundamental, GeneralSolution, Particular};
pub use variation::{variation_of_parameters, Antiderivative, ParticularSolution, VariationResult};

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::QExpr;
use crate::linop::LinOp;
use crate::quaternion::Quaternion;

/// Relative bound on `|q² − aq − b|` for accepting `e^{qx}` as a solution.
pub const CHARACTERISTIC_TOLERANCE: f64 = 1e-10;

/// `Ψ'' = aΨ' + bΨ` with constant quaternion coefficients acting from the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstCoeffEq {
    pub a: Quaternion,
    pub b: Quaternion,
}

impl ConstCoeffEq {
    pub fn new(a: Quaternion, b: Quaternion) -> Self {
        ConstCoeffEq { a, b }
    }

    /// Equation that has `e^{qx}` as a solution for the given `a`.
    pub fn with_root(a: Quaternion, q: Quaternion) -> Self {
        ConstCoeffEq { a, b: q * q - a * q }
    }

    /// `q² − aq − b`.
    pub fn characteristic(&self, q: Quaternion) -> Quaternion {
        q * q - self.a * q - self.b
    }

    pub fn admits_exponential(&self, q: Quaternion) -> bool {
        self.characteristic(q).norm() <= self.characteristic_scale(q) * CHARACTERISTIC_TOLERANCE
    }

    fn characteristic_scale(&self, q: Quaternion) -> f64 {
        let qn = q.norm();
        (qn * qn).max(self.a.norm() * qn).max(self.b.norm()).max(1.0)
    }

    pub fn alpha(&self) -> QExpr {
        QExpr::constant(self.a)
    }

    pub fn beta(&self) -> QExpr {
        QExpr::constant(self.b)
    }

    pub fn ivp(&self, rho: QExpr, x0: f64, f: Quaternion, g: Quaternion) -> Ivp {
        Ivp {
            alpha: self.alpha(),
            beta: self.beta(),
            rho,
            x0,
            f,
            g,
        }
    }
}

/// `Ψ'' = αΨ' + βΨ + ρ`, `Ψ(x₀) = f`, `Ψ'(x₀) = g`.
#[derive(Debug, Clone)]
pub struct Ivp {
    pub alpha: QExpr,
    pub beta: QExpr,
    pub rho: QExpr,
    pub x0: f64,
    pub f: Quaternion,
    pub g: Quaternion,
}

impl Ivp {
    pub fn homogeneous(alpha: QExpr, beta: QExpr, x0: f64, f: Quaternion, g: Quaternion) -> Self {
        Ivp {
            alpha,
            beta,
            rho: QExpr::zero(),
            x0,
            f,
            g,
        }
    }

    /// Same equation, new initial data.
    pub fn with_initial(&self, x0: f64, f: Quaternion, g: Quaternion) -> Self {
        Ivp {
            x0,
            f,
            g,
            ..self.clone()
        }
    }
}

/// `∫₀ˣ e^{ut} e^{vt} dt` via the resolution of `L_u + R_v`.
pub fn integrate_exp_product(u: Quaternion, v: Quaternion, x: f64) -> Quaternion {
    let res = (LinOp::left_mul(u) + LinOp::right_mul(v)).resolve();
    let f = u.exp_qx(x) * v.exp_qx(x);
    res.pinv.apply(f - Quaternion::ONE) + res.ker_proj.apply(Quaternion::ONE).scale(x)
}

/// The same integral as an expression in `x`.
pub fn exp_product_integral(u: Quaternion, v: Quaternion) -> QExpr {
    let res = (LinOp::left_mul(u) + LinOp::right_mul(v)).resolve();
    let product = QExpr::prod(QExpr::exp(u), QExpr::exp(v));
    QExpr::sum(vec![
        QExpr::apply_op(res.pinv, product),
        QExpr::constant(-res.pinv.apply(Quaternion::ONE)),
        QExpr::right_scale(QExpr::x(), res.ker_proj.apply(Quaternion::ONE)),
    ])
}

/// Second solution `ξ = e^{qx}∫₀ˣ e^{−qt}e^{(a−q)t} dt` from the known
/// solution `e^{qx}`.
///
/// Substituting `ξ = φτ` and `σ = φτ'` turns the equation into
/// `σ' = (a − q)σ`, so `τ' = e^{−qx}e^{(a−q)x}`. The lower limit 0 adds a
/// multiple `φ·c` of the first solution, which stays in the solution space.
pub fn reduce_order(eq: &ConstCoeffEq, q: Quaternion) -> Result<QExpr> {
    if !eq.admits_exponential(q) {
        return Err(Error::NotASolution {
            defect: eq.characteristic(q).norm(),
        });
    }
    Ok(QExpr::prod(QExpr::exp(q), exp_product_integral(-q, eq.a - q)))
}

/// Operator `L_{−q} + R_{a−q}` whose invertibility decides whether the
/// reduction-of-order partner picks up a term linear in `x`.
pub fn reduction_operator(eq: &ConstCoeffEq, q: Quaternion) -> LinOp {
    LinOp::left_mul(-q) + LinOp::right_mul(eq.a - q)
}

/// Polynomial particular solution `P(x) = Σ x^m p_m` of
/// `P'' = aP' + bP + ρ` for polynomial forcing `ρ = Σ x^m r_m`, by
/// undetermined coefficients. Needs `b` invertible.
pub fn polynomial_particular(eq: &ConstCoeffEq, rho: &[(u32, Quaternion)]) -> Result<QExpr> {
    let degree = rho.iter().map(|&(m, _)| m as usize).max().unwrap_or(0);
    let mut r = vec![Quaternion::ZERO; degree + 1];
    for &(m, c) in rho {
        r[m as usize] += c;
    }
    let b_inv = eq.b.inverse()?;
    // p_m = b⁻¹[(m+2)(m+1)p_{m+2} − (m+1)a p_{m+1} − r_m], from the top down
    let mut p = vec![Quaternion::ZERO; degree + 3];
    for m in (0..=degree).rev() {
        let mf = m as f64;
        let rhs = p[m + 2].scale((mf + 2.0) * (mf + 1.0)) - (eq.a * p[m + 1]).scale(mf + 1.0) - r[m];
        p[m] = b_inv * rhs;
    }
    let terms: Vec<(u32, Quaternion)> = p
        .iter()
        .take(degree + 1)
        .enumerate()
        .map(|(m, c)| (m as u32, *c))
        .collect();
    Ok(QExpr::polynomial(&terms))
}
