//! General solution `Ψ = φq₁ + ξq₂ + Ψ_p` and initial-condition fitting.

use crate::error::{Error, Result};
use crate::expr::{Differentiated, Jet, QExpr};
use crate::quaternion::Quaternion;
use crate::wronskian::{at_point, PairValues, DEPENDENCE_TOLERANCE};

use super::variation::ParticularSolution;

/// Solves `φq₁ + ξq₂ = f`, `φ'q₁ + ξ'q₂ = g` for right constants.
///
/// This is the 2×2 quaternionic inverse of `M = ((φ, ξ), (φ', ξ'))` in
/// Schur-complement form, pivoting on whichever of `φ`, `ξ` is larger:
/// for the `φ` pivot, `q₂ = [ξ' − φ'φ⁻¹ξ]⁻¹(g − φ'φ⁻¹f)` and
/// `q₁ = φ⁻¹(f − ξq₂)`. Only `|W| ≠ 0` and a nonzero pivot are needed,
/// not invertible derivatives.
pub fn solve_fundamental(p: &PairValues, f: Quaternion, g: Quaternion, x: f64) -> Result<(Quaternion, Quaternion)> {
    let m2 = p.modulus_squared();
    if !(m2 > DEPENDENCE_TOLERANCE) {
        return Err(Error::DependentPair { modulus_squared: m2, at: x });
    }
    let ctx = p.scale();
    let solve = || -> Result<(Quaternion, Quaternion)> {
        if p.phi.norm() >= p.xi.norm() {
            let phi_inv = p.phi.inverse_in_context(ctx)?;
            let lead = p.dphi * phi_inv;
            let schur = p.dxi - lead * p.xi;
            let q2 = schur.inverse_in_context(ctx)? * (g - lead * f);
            let q1 = phi_inv * (f - p.xi * q2);
            Ok((q1, q2))
        } else {
            let xi_inv = p.xi.inverse_in_context(ctx)?;
            let lead = p.dxi * xi_inv;
            let schur = p.dphi - lead * p.phi;
            let q1 = schur.inverse_in_context(ctx)? * (g - lead * f);
            let q2 = xi_inv * (f - p.phi * q1);
            Ok((q1, q2))
        }
    };
    solve().map_err(|e| at_point(e, x))
}

/// Forcing response carried by a [`GeneralSolution`].
#[derive(Debug, Clone)]
pub enum Particular {
    None,
    Expr(Differentiated),
    Variation(ParticularSolution),
}

impl Particular {
    pub fn jet(&self, x: f64) -> Result<Jet> {
        match self {
            Particular::None => Ok(Jet {
                value: Quaternion::ZERO,
                d1: Quaternion::ZERO,
                d2: Quaternion::ZERO,
            }),
            Particular::Expr(d) => Ok(d.jet(x)),
            Particular::Variation(p) => p.jet(x),
        }
    }
}

impl From<QExpr> for Particular {
    fn from(e: QExpr) -> Self {
        if e.is_literal_zero() {
            Particular::None
        } else {
            Particular::Expr(Differentiated::new(e))
        }
    }
}

impl From<ParticularSolution> for Particular {
    fn from(p: ParticularSolution) -> Self {
        Particular::Variation(p)
    }
}

/// `Ψ(x) = φ(x)q₁ + ξ(x)q₂ + Ψ_p(x)`; constants multiply from the right.
#[derive(Debug, Clone)]
pub struct GeneralSolution {
    pub phi: Differentiated,
    pub xi: Differentiated,
    pub q1: Quaternion,
    pub q2: Quaternion,
    pub particular: Particular,
}

impl GeneralSolution {
    pub fn jet(&self, x: f64) -> Result<Jet> {
        let p = self.phi.jet(x);
        let s = self.xi.jet(x);
        let part = self.particular.jet(x)?;
        Ok(Jet {
            value: p.value * self.q1 + s.value * self.q2 + part.value,
            d1: p.d1 * self.q1 + s.d1 * self.q2 + part.d1,
            d2: p.d2 * self.q1 + s.d2 * self.q2 + part.d2,
        })
    }

    pub fn eval(&self, x: f64) -> Result<Quaternion> {
        Ok(self.jet(x)?.value)
    }

    /// Homogeneous part as an expression, `φq₁ + ξq₂`.
    pub fn homogeneous_expr(&self) -> QExpr {
        QExpr::sum(alloc::vec![
            QExpr::right_scale(self.phi.f.clone(), self.q1),
            QExpr::right_scale(self.xi.f.clone(), self.q2),
        ])
    }
}

/// Picks `q₁, q₂` so that `Ψ(x₀) = f` and `Ψ'(x₀) = g`.
pub fn fit_initial_conditions(
    phi: &QExpr,
    xi: &QExpr,
    particular: Particular,
    x0: f64,
    f: Quaternion,
    g: Quaternion,
) -> Result<GeneralSolution> {
    let phi = Differentiated::new(phi.clone());
    let xi = Differentiated::new(xi.clone());
    let pv = PairValues {
        phi: phi.f.eval(x0),
        dphi: phi.d1.eval(x0),
        xi: xi.f.eval(x0),
        dxi: xi.d1.eval(x0),
    };
    let part = particular.jet(x0)?;
    let (q1, q2) = solve_fundamental(&pv, f - part.value, g - part.d1, x0)?;
    Ok(GeneralSolution {
        phi,
        xi,
        q1,
        q2,
        particular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const ONE: Quaternion = Quaternion::ONE;

    fn rq(rng: &mut ChaCha8Rng) -> Quaternion {
        Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
    }

    #[test]
    fn recovers_first_solution() {
        let phi = QExpr::exp(-I);
        let xi = QExpr::exp(-(I + J));
        let x0 = 0.4;
        let f = (-I).exp_qx(x0);
        let g = -I * f;
        let s = fit_initial_conditions(&phi, &xi, Particular::None, x0, f, g).unwrap();
        assert!(s.q1.dist(ONE) < 1e-14);
        assert!(s.q2.norm() < 1e-14);
    }

    #[test]
    fn round_trip_on_printed_pair() {
        // data built from q₁ = 1, q₂ = j for the pair (e^{−ix}, e^{(i−j)x})
        let phi = QExpr::exp(-I);
        let xi = QExpr::exp(I - J);
        let f = ONE + J;
        let g = -I + (I - J) * J;
        let s = fit_initial_conditions(&phi, &xi, Particular::None, 0.0, f, g).unwrap();
        assert!(s.q1.dist(ONE) < 1e-14);
        assert!(s.q2.dist(J) < 1e-14);
        let jet = s.jet(0.0).unwrap();
        assert!(jet.value.dist(f) < 1e-14 && jet.d1.dist(g) < 1e-14);
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let p = PairValues {
                phi: rq(&mut rng),
                dphi: rq(&mut rng),
                xi: rq(&mut rng),
                dxi: rq(&mut rng),
            };
            if p.modulus_squared() < 1e-3 {
                continue;
            }
            let (q1, q2) = (rq(&mut rng), rq(&mut rng));
            let f = p.phi * q1 + p.xi * q2;
            let g = p.dphi * q1 + p.dxi * q2;
            let (r1, r2) = solve_fundamental(&p, f, g, 0.0).unwrap();
            let cond = 1.0 / p.modulus_squared();
            assert!(r1.dist(q1) < 1e-10 * cond.max(1.0));
            assert!(r2.dist(q2) < 1e-10 * cond.max(1.0));
        }
    }

    #[test]
    fn derivative_free_pivot() {
        // φ = 1, ξ = x at 0: φ' = 0 and ξ = 0, still solvable
        let s = fit_initial_conditions(&QExpr::constant(ONE), &QExpr::x(), Particular::None, 0.0, I, J).unwrap();
        assert_eq!(s.q1, I);
        assert_eq!(s.q2, J);
    }

    #[test]
    fn dependent_pair_rejected() {
        let phi = QExpr::exp(-I);
        let xi = QExpr::right_scale(phi.clone(), J);
        let err = fit_initial_conditions(&phi, &xi, Particular::None, 0.0, ONE, ONE).unwrap_err();
        assert!(matches!(err, Error::DependentPair { .. }));
    }

    #[test]
    fn particular_is_subtracted() {
        let phi = QExpr::exp(-I);
        let xi = QExpr::exp(-(I + J));
        let part = QExpr::polynomial(&[(1, (I + J) / 2.0), (0, Quaternion::K / 2.0)]);
        let s = fit_initial_conditions(&phi, &xi, part.into(), 0.0, Quaternion::K / 2.0, (I + J) / 2.0).unwrap();
        assert!(s.q1.norm() < 1e-15 && s.q2.norm() < 1e-15);
    }
}
