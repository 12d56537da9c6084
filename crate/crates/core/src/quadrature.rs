//! Adaptive Simpson quadrature for quaternion-valued integrands.

use crate::quaternion::Quaternion;

/// Default absolute tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const MAX_DEPTH: u32 = 48;

/// `∫_a^b f(t) dt` by adaptive Simpson with Richardson correction.
/// Reversed limits give the negated integral.
pub fn simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Quaternion
where
    F: Fn(f64) -> Quaternion,
{
    if a == b {
        return Quaternion::ZERO;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + fm.scale(4.0) + fb);
    refine(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Real-valued convenience wrapper.
pub fn simpson_real<F>(f: F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    simpson(|t| Quaternion::real(f(t)), a, b, tol).w
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Quaternion,
    fm: Quaternion,
    fb: Quaternion,
    whole: Quaternion,
    tol: f64,
    depth: u32,
) -> Quaternion
where
    F: Fn(f64) -> Quaternion,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + flm.scale(4.0) + fm);
    let right = (b - m) / 6.0 * (fm + frm.scale(4.0) + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.max_abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
