//! Variation of parameters.
//!
//! With `Ψ_p = φν₁ + ξν₂` and the extra condition `φν₁' + ξν₂' = 0`, the
//! forcing fixes `φ'ν₁' + ξ'ν₂' = ρ`. Eliminating one unknown at a time:
//!
//! ```text
//! ν₁' = [φ' − ξ'ξ⁻¹φ]⁻¹ ρ,    ν₂' = [ξ' − φ'φ⁻¹ξ]⁻¹ ρ
//! ```
//!
//! Both brackets have modulus `|W|/|ξ|` and `|W|/|φ|`, so they are
//! invertible exactly when the pair is independent. The antiderivatives
//! are built numerically: adaptive Simpson between grid nodes, cubic
//! Hermite interpolation in between (the exact `ν'` is known at every node).

use alloc::vec::Vec;
use core::cell::RefCell;

use crate::error::{Error, Result};
use crate::expr::{Differentiated, Jet, QExpr};
use crate::quadrature;
use crate::quaternion::Quaternion;
use crate::wronskian::{at_point, PairValues, DEPENDENCE_TOLERANCE};

use super::general::solve_fundamental;

/// Absolute quadrature tolerance for the antiderivatives.
pub const VARIATION_TOLERANCE: f64 = 1e-10;

const INITIAL_SEGMENTS_PER_UNIT: f64 = 16.0;
const MAX_REFINEMENTS: u32 = 8;

/// Sampled antiderivative `A(x) = ∫_{x₀}^x f` on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct Antiderivative {
    nodes: Vec<f64>,
    values: Vec<Quaternion>,
    slopes: Vec<Quaternion>,
}

impl Antiderivative {
    /// Builds the table, halving the spacing until Hermite interpolation at
    /// every segment midpoint agrees with direct quadrature to `tol`.
    pub fn build<F>(f: F, x0: f64, lo: f64, hi: f64, tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<Quaternion>,
    {
        if !(lo <= x0 && x0 <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument("antiderivative anchor must lie inside [lo, hi]"));
        }
        let mut per_unit = INITIAL_SEGMENTS_PER_UNIT;
        let mut last = None;
        for _ in 0..=MAX_REFINEMENTS {
            let table = Self::tabulate(&f, x0, lo, hi, per_unit, tol)?;
            let err = table.midpoint_error(&f, tol)?;
            if err <= tol {
                return Ok(table);
            }
            last = Some(table);
            per_unit *= 2.0;
        }
        // refinement budget exhausted; keep the finest table
        Ok(last.expect("at least one table"))
    }

    fn tabulate<F>(f: &F, x0: f64, lo: f64, hi: f64, per_unit: f64, tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<Quaternion>,
    {
        let total = (hi - lo).max(f64::MIN_POSITIVE);
        let side = |len: f64| -> usize {
            if len <= 0.0 {
                0
            } else {
                (crate::math::ceil(len * per_unit) as usize).max(1)
            }
        };
        let (n_left, n_right) = (side(x0 - lo), side(hi - x0));
        let mut nodes = Vec::with_capacity(n_left + n_right + 1);
        for k in 0..n_left {
            nodes.push(lo + (x0 - lo) * k as f64 / n_left as f64);
        }
        nodes.push(x0);
        for k in 1..=n_right {
            nodes.push(x0 + (hi - x0) * k as f64 / n_right as f64);
        }
        let slopes = nodes.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        let mut values = alloc::vec![Quaternion::ZERO; nodes.len()];
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let integrand = |t: f64| match f(t) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Quaternion::ZERO
            }
        };
        let segment_tol = |a: f64, b: f64| tol * ((b - a).abs() / total).max(1e-3);
        // propagate from the anchor outwards
        for k in (n_left + 1)..nodes.len() {
            let (a, b) = (nodes[k - 1], nodes[k]);
            values[k] = values[k - 1] + quadrature::simpson(integrand, a, b, segment_tol(a, b));
        }
        for k in (0..n_left).rev() {
            let (a, b) = (nodes[k + 1], nodes[k]);
            values[k] = values[k + 1] + quadrature::simpson(integrand, a, b, segment_tol(a, b));
        }
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(Antiderivative { nodes, values, slopes })
    }

    fn midpoint_error<F>(&self, f: &F, tol: f64) -> Result<f64>
    where
        F: Fn(f64) -> Result<Quaternion>,
    {
        let mut worst = 0.0_f64;
        for k in 0..self.nodes.len().saturating_sub(1) {
            let (a, b) = (self.nodes[k], self.nodes[k + 1]);
            let m = 0.5 * (a + b);
            f(m)?;
            let direct = self.values[k]
                + quadrature::simpson(|t| f(t).unwrap_or(Quaternion::ZERO), a, m, tol * 1e-2);
            worst = worst.max(self.hermite(k, m).dist(direct));
        }
        Ok(worst)
    }

    fn hermite(&self, k: usize, x: f64) -> Quaternion {
        let (a, b) = (self.nodes[k], self.nodes[k + 1]);
        let h = b - a;
        let t = (x - a) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        self.values[k].scale(h00)
            + self.slopes[k].scale(h10 * h)
            + self.values[k + 1].scale(h01)
            + self.slopes[k + 1].scale(h11 * h)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn eval(&self, x: f64) -> Result<Quaternion> {
        let (lo, hi) = self.domain();
        if !(lo <= x && x <= hi) {
            return Err(Error::OutOfDomain { x, lo, hi });
        }
        if self.nodes.len() == 1 {
            return Ok(self.values[0]);
        }
        let k = self.nodes.partition_point(|&n| n <= x).clamp(1, self.nodes.len() - 1) - 1;
        Ok(self.hermite(k, x))
    }
}

/// `Ψ_p = φ(ν₁ + c₁) + ξ(ν₂ + c₂)`: the variation-of-parameters particular
/// solution with optional integration constants.
#[derive(Debug, Clone)]
pub struct ParticularSolution {
    phi: Differentiated,
    xi: Differentiated,
    rho: QExpr,
    nu1: Antiderivative,
    nu2: Antiderivative,
    c1: Quaternion,
    c2: Quaternion,
}

impl ParticularSolution {
    /// `(ν₁', ν₂')` at `x`.
    pub fn nu_prime(&self, x: f64) -> Result<(Quaternion, Quaternion)> {
        nu_prime(&self.phi, &self.xi, &self.rho, x)
    }

    /// `(ν₁(x), ν₂(x))` including the integration constants.
    pub fn nu(&self, x: f64) -> Result<(Quaternion, Quaternion)> {
        Ok((self.nu1.eval(x)? + self.c1, self.nu2.eval(x)? + self.c2))
    }

    pub fn constants(&self) -> (Quaternion, Quaternion) {
        (self.c1, self.c2)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.nu1.domain()
    }

    /// `Ψ_p, Ψ_p', Ψ_p''` at `x`, using `φν₁' + ξν₂' = 0` for the
    /// derivatives.
    pub fn jet(&self, x: f64) -> Result<Jet> {
        let (n1, n2) = self.nu(x)?;
        let (d1, d2) = self.nu_prime(x)?;
        let p = self.phi.jet(x);
        let s = self.xi.jet(x);
        Ok(Jet {
            value: p.value * n1 + s.value * n2,
            d1: p.d1 * n1 + s.d1 * n2 + p.value * d1 + s.value * d2,
            d2: p.d2 * n1 + s.d2 * n2 + p.d1 * d1 + s.d1 * d2,
        })
    }

    pub fn eval(&self, x: f64) -> Result<Quaternion> {
        Ok(self.jet(x)?.value)
    }

    /// Adds `(c₁, c₂)` to the integration constants, i.e. adds the
    /// homogeneous solution `φc₁ + ξc₂`.
    pub fn shifted(mut self, c1: Quaternion, c2: Quaternion) -> Self {
        self.c1 += c1;
        self.c2 += c2;
        self
    }

    /// Chooses the integration constants so that `Ψ_p(x) = value` and
    /// `Ψ_p'(x) = slope`. Particular solutions differ only by homogeneous
    /// terms, so this selects a representative without changing the
    /// forcing response.
    pub fn anchored(self, x: f64, value: Quaternion, slope: Quaternion) -> Result<Self> {
        let current = self.jet(x)?;
        let pair = PairValues {
            phi: self.phi.f.eval(x),
            dphi: self.phi.d1.eval(x),
            xi: self.xi.f.eval(x),
            dxi: self.xi.d1.eval(x),
        };
        let (c1, c2) = solve_fundamental(&pair, value - current.value, slope - current.d1, x)?;
        Ok(self.shifted(c1, c2))
    }
}

#[derive(Debug, Clone)]
pub struct VariationResult {
    pub particular: ParticularSolution,
}

impl VariationResult {
    pub fn nu1(&self) -> &Antiderivative {
        &self.particular.nu1
    }

    pub fn nu2(&self) -> &Antiderivative {
        &self.particular.nu2
    }
}

fn nu_prime(phi: &Differentiated, xi: &Differentiated, rho: &QExpr, x: f64) -> Result<(Quaternion, Quaternion)> {
    let pv = PairValues {
        phi: phi.f.eval(x),
        dphi: phi.d1.eval(x),
        xi: xi.f.eval(x),
        dxi: xi.d1.eval(x),
    };
    let r = rho.eval(x);
    let ctx = pv.scale();
    let inner = || -> Result<(Quaternion, Quaternion)> {
        let phi_inv = pv.phi.inverse_in_context(ctx)?;
        let xi_inv = pv.xi.inverse_in_context(ctx)?;
        let t = pv.dphi - pv.dxi * xi_inv * pv.phi;
        let s = pv.dxi - pv.dphi * phi_inv * pv.xi;
        Ok((t.inverse_in_context(ctx)? * r, s.inverse_in_context(ctx)? * r))
    };
    inner().map_err(|e| at_point(e, x))
}

/// Particular solution of `Ψ'' = αΨ' + βΨ + ρ` from an independent
/// homogeneous pair `(φ, ξ)`, with `ν₁(x₀) = ν₂(x₀) = 0`, tabulated on
/// `[lo, hi] ∋ x₀`.
pub fn variation_of_parameters(
    phi: &QExpr,
    xi: &QExpr,
    rho: &QExpr,
    x0: f64,
    lo: f64,
    hi: f64,
) -> Result<VariationResult> {
    let phi = Differentiated::new(phi.clone());
    let xi = Differentiated::new(xi.clone());
    let pair_at = |x: f64| PairValues {
        phi: phi.f.eval(x),
        dphi: phi.d1.eval(x),
        xi: xi.f.eval(x),
        dxi: xi.d1.eval(x),
    };
    // independence is checked at the anchor and across the interval
    let probes = 64;
    for n in 0..=probes {
        let x = if n == 0 { x0 } else { lo + (hi - lo) * n as f64 / probes as f64 };
        let m2 = pair_at(x).modulus_squared();
        if !(m2 > DEPENDENCE_TOLERANCE) {
            return Err(Error::DependentPair { modulus_squared: m2, at: x });
        }
    }
    let nu1 = Antiderivative::build(|t| nu_prime(&phi, &xi, rho, t).map(|p| p.0), x0, lo, hi, VARIATION_TOLERANCE)?;
    let nu2 = Antiderivative::build(|t| nu_prime(&phi, &xi, rho, t).map(|p| p.1), x0, lo, hi, VARIATION_TOLERANCE)?;
    Ok(VariationResult {
        particular: ParticularSolution {
            phi,
            xi,
            rho: rho.clone(),
            nu1,
            nu2,
            c1: Quaternion::ZERO,
            c2: Quaternion::ZERO,
        },
    })
}
