//! Real-linear operators on ℍ ≅ ℝ⁴.
//!
//! `left_mul(q)` is `Ψ ↦ qΨ` and `right_mul(p)` is `Ψ ↦ Ψp`, each written
//! as the 4×4 real matrix acting on the component column `(Ψ₀, Ψ₁, Ψ₂, Ψ₃)`.
//! They satisfy `L_q L_p = L_{qp}`, `R_q R_p = R_{pq}` and `[L_q, R_p] = 0`.

use core::ops::{Add, Mul, Neg, Sub};

use crate::math;
use crate::quaternion::Quaternion;

/// Relative singular-value threshold for rank decisions.
pub const RANK_TOLERANCE: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinOp {
    pub m: [[f64; 4]; 4],
}

impl LinOp {
    pub const ZERO: LinOp = LinOp { m: [[0.0; 4]; 4] };
    pub const IDENTITY: LinOp = LinOp {
        m: [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    };

    pub const fn from_rows(m: [[f64; 4]; 4]) -> Self {
        LinOp { m }
    }

    /// Matrix of `Ψ ↦ qΨ`.
    pub const fn left_mul(q: Quaternion) -> Self {
        let (q0, q1, q2, q3) = (q.w, q.x, q.y, q.z);
        LinOp {
            m: [
                [q0, -q1, -q2, -q3],
                [q1, q0, -q3, q2],
                [q2, q3, q0, -q1],
                [q3, -q2, q1, q0],
            ],
        }
    }

    /// Matrix of `Ψ ↦ Ψp`.
    pub const fn right_mul(p: Quaternion) -> Self {
        let (p0, p1, p2, p3) = (p.w, p.x, p.y, p.z);
        LinOp {
            m: [
                [p0, -p1, -p2, -p3],
                [p1, p0, p3, -p2],
                [p2, -p3, p0, p1],
                [p3, p2, -p1, p0],
            ],
        }
    }

    /// Apply to the component vector of `q`.
    pub fn apply(&self, q: Quaternion) -> Quaternion {
        let v = q.to_array();
        let mut out = [0.0; 4];
        for (o, row) in out.iter_mut().zip(self.m.iter()) {
            *o = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        }
        Quaternion::from_array(out)
    }

    pub fn transpose(&self) -> Self {
        let mut t = [[0.0; 4]; 4];
        for (r, row) in self.m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                t[c][r] = *v;
            }
        }
        LinOp { m: t }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.m.iter_mut().flatten().for_each(|v| *v *= s);
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// Entrywise maximum of `|self − other|`.
    pub fn max_abs_diff(&self, other: &LinOp) -> f64 {
        (*self - *other).max_abs()
    }

    /// Commutator `AB − BA`.
    pub fn commutator(&self, other: &LinOp) -> LinOp {
        *self * *other - *other * *self
    }

    pub fn is_skew_symmetric(&self, tol: f64) -> bool {
        (*self + self.transpose()).max_abs() <= tol
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (*self - self.transpose()).max_abs() <= tol
    }

    /// SVD-based pseudo-inverse, kernel projector and rank.
    pub fn resolve(&self) -> OpResolution {
        let svd = Svd::new(self);
        let sigma_max = svd.sigma.iter().copied().fold(0.0_f64, f64::max);
        let tau = RANK_TOLERANCE * if sigma_max > 0.0 { sigma_max } else { 1.0 };

        let mut pinv = LinOp::ZERO;
        let mut ker_proj = LinOp::ZERO;
        let mut rank = 0;
        for j in 0..4 {
            let v = svd.v_col(j);
            if svd.sigma[j] > tau {
                rank += 1;
                // v_j u_jᵀ / σ_j with u_j = b_j / σ_j
                let b = svd.b_col(j);
                let s2 = svd.sigma[j] * svd.sigma[j];
                for r in 0..4 {
                    for c in 0..4 {
                        pinv.m[r][c] += v[r] * b[c] / s2;
                    }
                }
            } else {
                for r in 0..4 {
                    for c in 0..4 {
                        ker_proj.m[r][c] += v[r] * v[c];
                    }
                }
            }
        }
        OpResolution {
            pinv,
            ker_proj,
            rank,
            invertible: rank == 4,
            singular_values: svd.sigma,
        }
    }
}

impl Add for LinOp {
    type Output = LinOp;
    fn add(self, o: LinOp) -> LinOp {
        let mut out = self;
        for (a, b) in out.m.iter_mut().flatten().zip(o.m.iter().flatten()) {
            *a += b;
        }
        out
    }
}

impl Sub for LinOp {
    type Output = LinOp;
    fn sub(self, o: LinOp) -> LinOp {
        self + (-o)
    }
}

impl Neg for LinOp {
    type Output = LinOp;
    fn neg(self) -> LinOp {
        self.scale(-1.0)
    }
}

/// Composition: `(A * B)Ψ = A(BΨ)`.
impl Mul for LinOp {
    type Output = LinOp;
    fn mul(self, o: LinOp) -> LinOp {
        let mut out = [[0.0; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.m[r][k] * o.m[k][c]).sum();
            }
        }
        LinOp { m: out }
    }
}

/// Outcome of [`LinOp::resolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpResolution {
    /// Moore–Penrose pseudo-inverse; the true inverse when `invertible`.
    pub pinv: LinOp,
    /// Orthogonal projector onto the kernel.
    pub ker_proj: LinOp,
    pub rank: usize,
    pub invertible: bool,
    /// Unsorted singular values, aligned with the internal Jacobi columns.
    pub singular_values: [f64; 4],
}

impl OpResolution {
    pub fn kernel_dim(&self) -> usize {
        4 - self.rank
    }
}

/// One-sided Jacobi SVD: rotates the columns of `B = A·V` until they are
/// mutually orthogonal. Then `σ_j = |b_j|` and `u_j = b_j/σ_j`.
struct Svd {
    b: [[f64; 4]; 4],
    v: [[f64; 4]; 4],
    sigma: [f64; 4],
}

impl Svd {
    fn new(a: &LinOp) -> Self {
        let mut b = a.m;
        let mut v = LinOp::IDENTITY.m;
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..3 {
                for q in (p + 1)..4 {
                    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                    for row in b.iter() {
                        alpha += row[p] * row[p];
                        beta += row[q] * row[q];
                        gamma += row[p] * row[q];
                    }
                    if gamma == 0.0 || gamma.abs() <= f64::EPSILON * math::sqrt(alpha * beta) {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + math::sqrt(1.0 + zeta * zeta));
                    let c = 1.0 / math::sqrt(1.0 + t * t);
                    let s = c * t;
                    for row in b.iter_mut().chain(v.iter_mut()) {
                        let (x, y) = (row[p], row[q]);
                        row[p] = c * x - s * y;
                        row[q] = s * x + c * y;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sigma = [0.0; 4];
        for (j, s) in sigma.iter_mut().enumerate() {
            *s = math::sqrt(b.iter().map(|row| row[j] * row[j]).sum());
        }
        Svd { b, v, sigma }
    }

    fn v_col(&self, j: usize) -> [f64; 4] {
        [self.v[0][j], self.v[1][j], self.v[2][j], self.v[3][j]]
    }

    fn b_col(&self, j: usize) -> [f64; 4] {
        [self.b[0][j], self.b[1][j], self.b[2][j], self.b[3][j]]
    }
}
