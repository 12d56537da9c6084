//! Calculus and solvers for second-order quaternionic ordinary differential
//! equations of the form
//!
//! ```text
//! Ψ'' = α(x) Ψ' + β(x) Ψ + ρ(x),   Ψ(x₀) = f,   Ψ'(x₀) = g
//! ```
//!
//! where every quantity lives in the quaternions ℍ and coefficients act from
//! the left. Solutions of the homogeneous equation form a right ℍ-module, so
//! constants always multiply from the right.
//!
//! The crate is `no_std` (with `alloc`). Elementary functions come from
//! [`libm`].
//!
//! Layout:
//! - [`quaternion`]: Hamilton arithmetic, inverses, `e^{qx}`, text form.
//! - [`linop`]: left/right multiplication operators as real 4×4 matrices,
//!   SVD-based pseudo-inverse and kernel projector.
//! - [`expr`]: expression trees for quaternionic functions of one real
//!   variable, closed under exact differentiation.
//! - [`quadrature`]: adaptive Simpson integration of quaternion-valued
//!   integrands.
//! - [`wronskian`]: Wronskian variants, the real modulus `|W|²`, its
//!   Dieudonné-determinant form, dependence test and scaling law.
//! - [`solver`]: reduction of order, exponential-product integrals,
//!   variation of parameters, initial-condition fitting.
//! - [`oracle`]: reduction to an 8-dimensional real system and classical RK4.

#![no_std]

extern crate alloc;

mod error;
pub mod expr;
pub mod linop;
mod math;
pub mod oracle;
pub mod quadrature;
pub mod quaternion;
pub mod solver;
pub mod wronskian;

pub use error::{Error, Result};
pub use expr::QExpr;
pub use linop::{LinOp, OpResolution};
pub use quaternion::Quaternion;
