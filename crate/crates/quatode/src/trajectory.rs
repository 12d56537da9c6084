//! Trajectory tables and their CSV form.
//!
//! Columns: `x, psi0..psi3, dpsi0..dpsi3, residual_norm`. The residual is
//! `|Ψ'' − aΨ' − bΨ − ρ|` with `Ψ''` taken by three-point finite differences
//! of the sampled `Ψ'`, so it measures the trajectory itself rather than the
//! integrator's right-hand side.

use std::io::Write;

use quatode_core::oracle::Trajectory;
use quatode_core::solver::Ivp;
use quatode_core::Quaternion;

use crate::error::Result;

pub const HEADER: [&str; 10] = [
    "x", "psi0", "psi1", "psi2", "psi3", "dpsi0", "dpsi1", "dpsi2", "dpsi3", "residual_norm",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub x: f64,
    pub psi: Quaternion,
    pub dpsi: Quaternion,
    pub residual_norm: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryTable {
    pub rows: Vec<Row>,
    pub h: f64,
    pub method: &'static str,
}

/// Derivative at `xs[at]` of the quadratic through three nodes.
fn three_point(xs: [f64; 3], ys: [Quaternion; 3], at: usize) -> Quaternion {
    let t = xs[at];
    let [x0, x1, x2] = xs;
    ys[0].scale((2.0 * t - x1 - x2) / ((x0 - x1) * (x0 - x2)))
        + ys[1].scale((2.0 * t - x0 - x2) / ((x1 - x0) * (x1 - x2)))
        + ys[2].scale((2.0 * t - x0 - x1) / ((x2 - x0) * (x2 - x1)))
}

fn second_derivatives(traj: &Trajectory) -> Vec<Quaternion> {
    let s = &traj.samples;
    let n = s.len();
    match n {
        0 | 1 => vec![Quaternion::ZERO; n],
        2 => {
            let d = (s[1].dpsi - s[0].dpsi).scale(1.0 / (s[1].x - s[0].x));
            vec![d, d]
        }
        _ => (0..n)
            .map(|k| {
                let (start, at) = match k {
                    0 => (0, 0),
                    k if k == n - 1 => (n - 3, 2),
                    k => (k - 1, 1),
                };
                let xs = [s[start].x, s[start + 1].x, s[start + 2].x];
                let ys = [s[start].dpsi, s[start + 1].dpsi, s[start + 2].dpsi];
                three_point(xs, ys, at)
            })
            .collect(),
    }
}

impl TrajectoryTable {
    pub fn new(traj: &Trajectory, ivp: &Ivp) -> Self {
        let d2 = second_derivatives(traj);
        let rows = traj
            .samples
            .iter()
            .zip(d2)
            .map(|(s, d2)| {
                let r = d2 - ivp.alpha.eval(s.x) * s.dpsi - ivp.beta.eval(s.x) * s.psi - ivp.rho.eval(s.x);
                Row { x: s.x, psi: s.psi, dpsi: s.dpsi, residual_norm: r.norm() }
            })
            .collect();
        TrajectoryTable { rows, h: traj.h, method: traj.method }
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual_norm).fold(0.0, f64::max)
    }

    pub fn last(&self) -> &Row {
        &self.rows[self.rows.len() - 1]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER)?;
        for r in &self.rows {
            let [p0, p1, p2, p3] = r.psi.to_array();
            let [d0, d1, d2, d3] = r.dpsi.to_array();
            let fields = [r.x, p0, p1, p2, p3, d0, d1, d2, d3, r.residual_norm];
            w.write_record(fields.iter().map(|v| v.to_string()))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use quatode_core::oracle::RealSystem;
    use quatode_core::solver::ConstCoeffEq;
    use quatode_core::QExpr;

    #[test]
    fn three_point_is_exact_on_quadratics() {
        let f = |x: f64| Quaternion::new(x * x, 3.0 * x, -x * x + 1.0, 0.5);
        let df = |x: f64| Quaternion::new(2.0 * x, 3.0, -2.0 * x, 0.0);
        let xs = [0.1, 0.35, 0.4];
        for at in 0..3 {
            let d = three_point(xs, xs.map(f), at);
            assert!(d.dist(df(xs[at])) < 1e-12);
        }
    }

    #[test]
    fn residual_column_is_small_for_a_true_solution() {
        let eq = ConstCoeffEq::new(-Quaternion::J, -(Quaternion::ONE - Quaternion::K));
        let ivp = eq.ivp(QExpr::zero(), 0.0, Quaternion::ONE, -Quaternion::I);
        let traj = RealSystem::new(&ivp).integrate(2.0, 1e-3).unwrap();
        let table = TrajectoryTable::new(&traj, &ivp);
        assert!(table.max_residual() < 1e-5);
        // the wrong equation is flagged
        let other = ConstCoeffEq::new(Quaternion::J, -(Quaternion::ONE - Quaternion::K));
        let wrong = TrajectoryTable::new(&traj, &other.ivp(QExpr::zero(), 0.0, Quaternion::ONE, -Quaternion::I));
        assert!(wrong.max_residual() > 0.1);
    }

    #[test]
    fn csv_layout() {
        let ivp = quatode_core::solver::Ivp::homogeneous(QExpr::zero(), QExpr::zero(), 0.0, Quaternion::ONE, Quaternion::ZERO);
        let traj = RealSystem::new(&ivp).integrate(0.5, 0.25).unwrap();
        let mut buf = Vec::new();
        TrajectoryTable::new(&traj, &ivp).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,psi0,psi1,psi2,psi3,dpsi0,dpsi1,dpsi2,dpsi3,residual_norm");
        assert_eq!(lines[1], "0,1,0,0,0,0,0,0,0,0");
        assert_eq!(lines[3], "0.5,1,0,0,0,0,0,0,0,0");
        assert_eq!(lines.len(), 4);
    }
}
