//! Numeric oracle: the quaternionic IVP as an 8-dimensional real system,
//! integrated with classical fourth-order Runge–Kutta.
//!
//! With `y = (Ψ, Ψ')` split into real components,
//!
//! ```text
//! y' = ( 0    I  ) y + ( 0 )
//!      ( B(x) A(x) )   ( ρ )
//! ```
//!
//! where `A = L_{α(x)}` and `B = L_{β(x)}` are left-multiplication matrices.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{Differentiated, Jet, QExpr};
use crate::linop::LinOp;
use crate::quaternion::Quaternion;
use crate::solver::Ivp;

/// Default RK4 step.
pub const DEFAULT_STEP: f64 = 1e-3;

pub const METHOD_RK4: &str = "rk4";

/// Right-hand side of the real first-order system for one IVP.
#[derive(Debug, Clone)]
pub struct RealSystem {
    ivp: Ivp,
}

pub type State = [f64; 8];

impl RealSystem {
    pub fn new(ivp: &Ivp) -> Self {
        RealSystem { ivp: ivp.clone() }
    }

    pub fn ivp(&self) -> &Ivp {
        &self.ivp
    }

    /// `(L_{α(x)}, L_{β(x)})`.
    pub fn blocks(&self, x: f64) -> (LinOp, LinOp) {
        (LinOp::left_mul(self.ivp.alpha.eval(x)), LinOp::left_mul(self.ivp.beta.eval(x)))
    }

    /// `(f, g)` as a state vector.
    pub fn initial_state(&self) -> State {
        pack(self.ivp.f, self.ivp.g)
    }

    pub fn rhs(&self, x: f64, y: &State) -> State {
        let (psi, dpsi) = unpack(y);
        let (a, b) = self.blocks(x);
        let d2 = a.apply(dpsi) + b.apply(psi) + self.ivp.rho.eval(x);
        pack(dpsi, d2)
    }

    /// Integrates from the IVP data at `x₀` to `x_end`.
    pub fn integrate(&self, x_end: f64, h: f64) -> Result<Trajectory> {
        self.integrate_from(self.ivp.x0, self.initial_state(), x_end, h)
    }

    /// Integrates from an arbitrary state; `x_end < x_start` runs backward.
    /// The last step is shortened to land exactly on `x_end`.
    pub fn integrate_from(&self, x_start: f64, y0: State, x_end: f64, h: f64) -> Result<Trajectory> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument("step size must be positive and finite"));
        }
        if !x_start.is_finite() || !x_end.is_finite() || x_start == x_end {
            return Err(Error::InvalidArgument("integration interval must be finite and non-empty"));
        }
        let span = x_end - x_start;
        let dir = span.signum();
        let full = libm::floor(span.abs() / h) as usize;
        // a remainder below this is absorbed into the last full step
        let slack = 1e-9 * h;
        let (full, shortened) = if span.abs() - full as f64 * h > slack {
            (full, true)
        } else {
            (full, false)
        };
        let steps = if shortened { full + 1 } else { full.max(1) };
        let mut samples = Vec::with_capacity(steps + 1);
        samples.push(Sample::from_state(x_start, &y0));
        let mut y = y0;
        let mut x = x_start;
        for n in 1..=steps {
            let x_next = if n == steps { x_end } else { x_start + dir * h * n as f64 };
            y = rk4_step(self, x, &y, x_next - x);
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteState { at: x_next });
            }
            x = x_next;
            samples.push(Sample::from_state(x, &y));
        }
        Ok(Trajectory { samples, h, method: METHOD_RK4 })
    }
}

pub fn to_real_system(ivp: &Ivp) -> RealSystem {
    RealSystem::new(ivp)
}

fn rk4_step(sys: &RealSystem, x: f64, y: &State, h: f64) -> State {
    let axpy = |a: &State, s: f64, b: &State| -> State {
        let mut out = *a;
        for (o, v) in out.iter_mut().zip(b.iter()) {
            *o += s * v;
        }
        out
    };
    let k1 = sys.rhs(x, y);
    let k2 = sys.rhs(x + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = sys.rhs(x + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = sys.rhs(x + h, &axpy(y, h, &k3));
    let mut out = *y;
    for n in 0..8 {
        out[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    }
    out
}

fn pack(psi: Quaternion, dpsi: Quaternion) -> State {
    let (a, b) = (psi.to_array(), dpsi.to_array());
    [a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]]
}

fn unpack(y: &State) -> (Quaternion, Quaternion) {
    (Quaternion::new(y[0], y[1], y[2], y[3]), Quaternion::new(y[4], y[5], y[6], y[7]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub psi: Quaternion,
    pub dpsi: Quaternion,
}

impl Sample {
    fn from_state(x: f64, y: &State) -> Self {
        let (psi, dpsi) = unpack(y);
        Sample { x, psi, dpsi }
    }

    pub fn state(&self) -> State {
        pack(self.psi, self.dpsi)
    }
}

/// Samples in integration order: strictly increasing in `x` for forward
/// runs, strictly decreasing for backward runs.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub h: f64,
    pub method: &'static str,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        &self.samples[self.samples.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `Ψ(x)` by cubic Hermite interpolation between samples, using the
    /// stored `Ψ'`.
    pub fn psi_at(&self, x: f64) -> Result<Quaternion> {
        let (a, b) = (self.first().x, self.last().x);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if !(lo <= x && x <= hi) {
            return Err(Error::OutOfDomain { x, lo, hi });
        }
        let forward = a <= b;
        let k = self
            .samples
            .partition_point(|s| if forward { s.x <= x } else { s.x >= x })
            .clamp(1, self.samples.len() - 1)
            - 1;
        let (s0, s1) = (&self.samples[k], &self.samples[k + 1]);
        let h = s1.x - s0.x;
        let t = (x - s0.x) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        Ok(s0.psi.scale(2.0 * t3 - 3.0 * t2 + 1.0)
            + s0.dpsi.scale((t3 - 2.0 * t2 + t) * h)
            + s1.psi.scale(-2.0 * t3 + 3.0 * t2)
            + s1.dpsi.scale((t3 - t2) * h))
    }
}

/// `Ψ''(x) − α(x)Ψ'(x) − β(x)Ψ(x) − ρ(x)` from exact derivatives.
pub fn residual(psi: &QExpr, ivp: &Ivp, x: f64) -> Quaternion {
    residual_of_jet(&Differentiated::new(psi.clone()).jet(x), ivp, x)
}

/// Same as [`residual`] for an already differentiated candidate.
pub fn residual_of_jet(jet: &Jet, ivp: &Ivp, x: f64) -> Quaternion {
    jet.d2 - ivp.alpha.eval(x) * jet.d1 - ivp.beta.eval(x) * jet.value - ivp.rho.eval(x)
}

/// Largest residual norm over `n + 1` equispaced points of `[lo, hi]`.
pub fn max_residual(psi: &QExpr, ivp: &Ivp, lo: f64, hi: f64, n: usize) -> f64 {
    let d = Differentiated::new(psi.clone());
    (0..=n)
        .map(|k| {
            let x = lo + (hi - lo) * k as f64 / n.max(1) as f64;
            residual_of_jet(&d.jet(x), ivp, x).norm()
        })
        .fold(0.0, f64::max)
}

/// Outcome of [`uniqueness_probe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport {
    /// Largest state difference between runs with `h` and `h/2` at common nodes.
    pub step_halving: f64,
    /// State difference after integrating `x₀ → x_end → x₀`.
    pub round_trip: f64,
}

impl ProbeReport {
    pub fn discrepancy(&self) -> f64 {
        self.step_halving.max(self.round_trip)
    }
}

/// Well-posedness proxy: two step sizes must agree, and integrating out
/// and back must return to the initial data.
pub fn uniqueness_probe(ivp: &Ivp, x_end: f64) -> Result<ProbeReport> {
    uniqueness_probe_with_step(ivp, x_end, DEFAULT_STEP)
}

pub fn uniqueness_probe_with_step(ivp: &Ivp, x_end: f64, h: f64) -> Result<ProbeReport> {
    let sys = RealSystem::new(ivp);
    let coarse = sys.integrate(x_end, h)?;
    let fine = sys.integrate(x_end, 0.5 * h)?;
    let mut step_halving = state_dist(&coarse.last().state(), &fine.last().state());
    for (n, s) in coarse.samples.iter().enumerate() {
        if let Some(f) = fine.samples.get(2 * n) {
            if f.x == s.x {
                step_halving = step_halving.max(state_dist(&s.state(), &f.state()));
            }
        }
    }
    let end = coarse.last();
    let back = sys.integrate_from(end.x, end.state(), ivp.x0, h)?;
    let round_trip = state_dist(&back.last().state(), &sys.initial_state());
    Ok(ProbeReport { step_halving, round_trip })
}

fn state_dist(a: &State, b: &State) -> f64 {
    a.iter().zip(b.iter()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{polynomial_particular, reduce_order, ConstCoeffEq};
    use core::f64::consts::PI;

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;
    const ONE: Quaternion = Quaternion::ONE;

    fn example_one() -> ConstCoeffEq {
        ConstCoeffEq::new(-J, -(ONE - K))
    }

    fn max_error_vs(traj: &Trajectory, exact: impl Fn(f64) -> Quaternion) -> f64 {
        traj.samples.iter().map(|s| s.psi.dist(exact(s.x))).fold(0.0, f64::max)
    }

    #[test]
    fn zero_system_is_constant() {
        let ivp = Ivp::homogeneous(QExpr::zero(), QExpr::zero(), 0.0, ONE, Quaternion::ZERO);
        let t = RealSystem::new(&ivp).integrate(1.0, 0.1).unwrap();
        assert_eq!(t.len(), 11);
        for s in &t.samples {
            assert_eq!(s.psi, ONE);
            assert_eq!(s.dpsi, Quaternion::ZERO);
        }
        assert_eq!(t.last().x, 1.0);
        let p = uniqueness_probe(&ivp, 2.0).unwrap();
        assert_eq!(p.discrepancy(), 0.0);
    }

    #[test]
    fn first_sample_is_initial_data_and_grid_is_monotone() {
        let ivp = example_one().ivp(QExpr::zero(), 0.25, I, J);
        let t = RealSystem::new(&ivp).integrate(1.0, 0.1).unwrap();
        assert_eq!(t.first().x, 0.25);
        assert_eq!(t.first().psi, I);
        assert_eq!(t.first().dpsi, J);
        assert!(t.samples.windows(2).all(|w| w[1].x > w[0].x));
        assert_eq!(t.last().x, 1.0);
        // 7 full steps then a shortened one of 0.05
        assert_eq!(t.len(), 9);
        let back = RealSystem::new(&ivp).integrate(-1.0, 0.1).unwrap();
        assert!(back.samples.windows(2).all(|w| w[1].x < w[0].x));
        assert_eq!(back.last().x, -1.0);
    }

    #[test]
    fn rejects_bad_steps() {
        let ivp = example_one().ivp(QExpr::zero(), 0.0, ONE, ONE);
        let sys = RealSystem::new(&ivp);
        assert!(sys.integrate(1.0, 0.0).is_err());
        assert!(sys.integrate(1.0, -1e-3).is_err());
        assert!(sys.integrate(1.0, f64::NAN).is_err());
        assert!(sys.integrate(0.0, 1e-3).is_err());
    }

    #[test]
    fn cosine() {
        let ivp = Ivp::homogeneous(QExpr::zero(), QExpr::constant(-ONE), 0.0, ONE, Quaternion::ZERO);
        let t = RealSystem::new(&ivp).integrate(PI, 1e-3).unwrap();
        assert!(t.last().psi.dist(-ONE) < 1e-8);
    }

    #[test]
    fn example_one_matches_exponential() {
        let ivp = example_one().ivp(QExpr::zero(), 0.0, ONE, -I);
        let t = RealSystem::new(&ivp).integrate(1.0, 1e-3).unwrap();
        assert!(t.last().psi.dist((-I).exp_qx(1.0)) < 1e-6);
        assert!(max_error_vs(&t, |x| (-I).exp_qx(x)) < 1e-6);
    }

    #[test]
    fn blocks_are_left_multiplication() {
        let alpha = Quaternion::new(0.3, -1.2, 0.7, 2.5);
        let beta = Quaternion::new(-0.4, 0.9, -1.1, 0.2);
        let ivp = Ivp::homogeneous(QExpr::constant(alpha), QExpr::constant(beta), 0.0, ONE, ONE);
        let (a, b) = RealSystem::new(&ivp).blocks(0.7);
        assert_eq!(a, LinOp::left_mul(alpha));
        assert_eq!(b, LinOp::left_mul(beta));
        let (a0, a1, a2, a3) = (alpha.w, alpha.x, alpha.y, alpha.z);
        let pattern = [
            [a0, -a1, -a2, -a3],
            [a1, a0, -a3, a2],
            [a2, a3, a0, -a1],
            [a3, -a2, a1, a0],
        ];
        assert_eq!(a.m, pattern);
        // the rhs applies them to the right halves of the state
        let y = [0.1, 0.2, 0.3, 0.4, -0.5, 0.6, -0.7, 0.8];
        let r = RealSystem::new(&ivp).rhs(0.7, &y);
        let want = alpha * Quaternion::new(-0.5, 0.6, -0.7, 0.8) + beta * Quaternion::new(0.1, 0.2, 0.3, 0.4);
        assert_eq!(&r[..4], &y[4..]);
        assert!(Quaternion::new(r[4], r[5], r[6], r[7]).dist(want) < 1e-15);
    }

    #[test]
    fn fourth_order_convergence() {
        let ivp = example_one().ivp(QExpr::zero(), 0.0, ONE, -I);
        let exact = |x: f64| (-I).exp_qx(x);
        let sys = RealSystem::new(&ivp);
        let e1 = max_error_vs(&sys.integrate(2.0, 0.04).unwrap(), exact);
        let e2 = max_error_vs(&sys.integrate(2.0, 0.02).unwrap(), exact);
        let order = libm::log2(e1 / e2);
        assert!((3.7..=4.3).contains(&order), "order {order}");
    }

    #[test]
    fn exact_residuals() {
        let eq = example_one();
        let ivp = eq.ivp(QExpr::zero(), 0.0, ONE, ONE);
        for n in 0..=20 {
            let x = 0.1 * n as f64;
            assert!(residual(&QExpr::exp(-I), &ivp, x).norm() < 1e-12);
        }
        let ex3 = ConstCoeffEq::new(-I, -K / 2.0).ivp(QExpr::zero(), 0.0, ONE, ONE);
        let bare = QExpr::prod(QExpr::x(), QExpr::exp(-(I + J) / 2.0));
        assert!(max_residual(&bare, &ex3, 0.0, 2.0, 200) > 0.1);
        let rho = QExpr::right_scale(QExpr::x(), I);
        let ex4 = eq.ivp(rho, 0.0, ONE, ONE);
        let p = polynomial_particular(&eq, &[(1, I)]).unwrap();
        assert!(max_residual(&p, &ex4, 0.0, 2.0, 200) < 1e-10);
    }

    #[test]
    fn analytic_partner_agrees_with_oracle() {
        let eq = example_one();
        let xi = reduce_order(&eq, -I).unwrap();
        let d = Differentiated::new(xi.clone());
        let ivp = eq.ivp(QExpr::zero(), 0.0, d.f.eval(0.0), d.d1.eval(0.0));
        let t = RealSystem::new(&ivp).integrate(2.0, 1e-3).unwrap();
        assert!(max_error_vs(&t, |x| xi.eval(x)) < 1e-8);
        for n in 0..=200 {
            let x = 0.01 * n as f64;
            assert!(t.psi_at(x).unwrap().dist(xi.eval(x)) < 1e-8);
        }
    }

    #[test]
    fn probe_on_smooth_problems() {
        let eq = example_one();
        let p = uniqueness_probe(&eq.ivp(QExpr::zero(), 0.0, ONE, -I), 2.0).unwrap();
        assert!(p.discrepancy() < 1e-7, "{p:?}");
        let forced = eq.ivp(QExpr::right_scale(QExpr::x(), I), 0.0, J + K, ONE - I);
        let p = uniqueness_probe(&forced, 2.0).unwrap();
        assert!(p.round_trip < 1e-6, "{p:?}");
    }

    #[test]
    fn blow_up_is_reported() {
        let ivp = Ivp::homogeneous(QExpr::zero(), QExpr::constant(Quaternion::real(1e6)), 0.0, ONE, ONE);
        let err = RealSystem::new(&ivp).integrate(10.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::NonFiniteState { .. }));
    }
}
