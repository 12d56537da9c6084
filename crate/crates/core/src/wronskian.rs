//! Wronskian functionals for pairs of quaternionic functions.
//!
//! The classic `φξ' − φ'ξ` does not survive noncommutativity: for the
//! dependent pair `(φ, φq)` it equals `(φφ' − φ'φ)q`, which is generically
//! nonzero. Four quaternion-valued replacements exist (`W_L`, `W_R`, `W̃_L`,
//! `W̃_R`); they differ from one another but share one modulus,
//!
//! ```text
//! |W|² = |φ|²|ξ'|² + |ξ|²|φ'|² − 2 Re(φ' φ̄ ξ ξ̄')
//! ```
//!
//! which also equals `det(M M⁺)` for the fundamental matrix
//! `M = ((φ, ξ), (φ', ξ'))`. Two solutions of a homogeneous equation are
//! right-linearly dependent iff `|W|` vanishes at a single point, and along
//! solutions `|W(x)| = exp(∫ Re α)·|W(x₀)|`.

use crate::error::{Error, Result};
use crate::expr::{Differentiated, QExpr};
use crate::math;
use crate::quadrature;
use crate::quaternion::Quaternion;

/// Absolute threshold on `|W|²` for declaring a pair dependent.
pub const DEPENDENCE_TOLERANCE: f64 = 1e-9;

/// Relative bound on the imaginary residue of the real-valued modulus.
const IMAGINARY_RESIDUE_BOUND: f64 = 1e-10;

/// Values of `φ, φ', ξ, ξ'` at one point, i.e. the entries of `M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairValues {
    pub phi: Quaternion,
    pub dphi: Quaternion,
    pub xi: Quaternion,
    pub dxi: Quaternion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WronskianVariants {
    pub wl: Quaternion,
    pub wr: Quaternion,
    pub wl_tilde: Quaternion,
    pub wr_tilde: Quaternion,
}

impl WronskianVariants {
    pub fn as_array(&self) -> [Quaternion; 4] {
        [self.wl, self.wr, self.wl_tilde, self.wr_tilde]
    }
}

impl PairValues {
    pub fn scale(&self) -> f64 {
        self.phi
            .max_abs()
            .max(self.dphi.max_abs())
            .max(self.xi.max_abs())
            .max(self.dxi.max_abs())
    }

    /// `W_L = φ(ξ' − φ'φ⁻¹ξ)`, `W_R = (ξ' − φ'φ⁻¹ξ)φ`,
    /// `W̃_L = −ξ(φ' − ξ'ξ⁻¹φ)`, `W̃_R = −(φ' − ξ'ξ⁻¹φ)ξ`.
    pub fn variants(&self) -> Result<WronskianVariants> {
        let ctx = self.scale();
        let phi_inv = self.phi.inverse_in_context(ctx)?;
        let xi_inv = self.xi.inverse_in_context(ctx)?;
        let s = self.dxi - self.dphi * phi_inv * self.xi;
        let t = self.dphi - self.dxi * xi_inv * self.phi;
        Ok(WronskianVariants {
            wl: self.phi * s,
            wr: s * self.phi,
            wl_tilde: -(self.xi * t),
            wr_tilde: -(t * self.xi),
        })
    }

    /// `|W|²`, real by construction.
    pub fn modulus_squared(&self) -> f64 {
        let cross = self.dphi * self.phi.conj() * self.xi * self.dxi.conj();
        // cross + conj(cross) is real; the imaginary residue is a sanity check
        let both = cross + self.dxi * self.xi.conj() * self.phi * self.dphi.conj();
        let magnitude = self.phi.norm_sqr() * self.dxi.norm_sqr() + self.xi.norm_sqr() * self.dphi.norm_sqr();
        debug_assert!(
            both.imag().norm() <= IMAGINARY_RESIDUE_BOUND * magnitude.max(1.0),
            "imaginary residue {} in |W|^2",
            both.imag().norm()
        );
        (magnitude - both.w).max(0.0)
    }

    /// `det(M M⁺)` for `M = ((φ, ξ), (φ', ξ'))`, computed from the Hermitian
    /// product `H = M M⁺` as `h₁₁h₂₂ − h₁₂h₂₁`.
    pub fn dieudonne_det_squared(&self) -> f64 {
        let h11 = self.phi.norm_sqr() + self.xi.norm_sqr();
        let h22 = self.dphi.norm_sqr() + self.dxi.norm_sqr();
        let h12 = self.phi * self.dphi.conj() + self.xi * self.dxi.conj();
        let h21 = self.dphi * self.phi.conj() + self.dxi * self.xi.conj();
        let det = Quaternion::real(h11 * h22) - h12 * h21;
        det.w.max(0.0)
    }
}

/// Two candidate solutions with their exact derivatives.
#[derive(Debug, Clone)]
pub struct FundamentalPair {
    pub phi: Differentiated,
    pub xi: Differentiated,
}

impl FundamentalPair {
    pub fn new(phi: QExpr, xi: QExpr) -> Self {
        FundamentalPair {
            phi: Differentiated::new(phi),
            xi: Differentiated::new(xi),
        }
    }

    /// Both functions as pure exponentials `(e^{px}, e^{sx})`.
    pub fn exponentials(p: Quaternion, s: Quaternion) -> Self {
        FundamentalPair::new(QExpr::exp(p), QExpr::exp(s))
    }

    pub fn at(&self, x: f64) -> PairValues {
        PairValues {
            phi: self.phi.f.eval(x),
            dphi: self.phi.d1.eval(x),
            xi: self.xi.f.eval(x),
            dxi: self.xi.d1.eval(x),
        }
    }

    pub fn variants(&self, x: f64) -> Result<WronskianVariants> {
        self.at(x).variants().map_err(|e| at_point(e, x))
    }

    pub fn modulus_squared(&self, x: f64) -> f64 {
        self.at(x).modulus_squared()
    }

    pub fn modulus(&self, x: f64) -> f64 {
        math::sqrt(self.modulus_squared(x))
    }

    pub fn dieudonne_det_squared(&self, x: f64) -> f64 {
        self.at(x).dieudonne_det_squared()
    }

    /// Dependent iff `|W|²(x₀) < 1e−9`.
    pub fn dependence_test(&self, x0: f64) -> bool {
        self.modulus_squared(x0) < DEPENDENCE_TOLERANCE
    }

    /// `(|W(x₁)|, exp(∫_{x₀}^{x₁} Re α)·|W(x₀)|)`. The pair is assumed to
    /// solve `Ψ'' = αΨ' + βΨ`.
    pub fn scaling_check(&self, alpha: &QExpr, x0: f64, x1: f64) -> (f64, f64) {
        let lhs = self.modulus(x1);
        let integral = quadrature::simpson_real(|t| alpha.eval(t).w, x0, x1, quadrature::DEFAULT_TOLERANCE);
        (lhs, math::exp(integral) * self.modulus(x0))
    }
}

pub(crate) fn at_point(e: Error, x: f64) -> Error {
    match e {
        Error::NearZeroQuaternion { modulus, at: None } => Error::NearZeroQuaternion { modulus, at: Some(x) },
        other => other,
    }
}
