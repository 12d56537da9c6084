//! Hamilton quaternions over `f64`.
//!
//! Basis `{1, i, j, k}` with `i² = j² = k² = ijk = −1`. The text form is
//! `a+bi+cj+dk`, where a negative component replaces its `+` with `-`.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math;

/// Relative scale of the inversion guard.
pub const INVERSE_TOLERANCE: f64 = 1e-12;

/// Below this value of `|Im q|·|x|` the exponential uses the `sin θ/θ` series.
const EXP_SERIES_SWITCH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    #[inline]
    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub const fn from_array(c: [f64; 4]) -> Self {
        Quaternion::new(c[0], c[1], c[2], c[3])
    }

    #[inline]
    pub const fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Imaginary part `xi + yj + zk`.
    #[inline]
    pub const fn imag(self) -> Self {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub const fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    /// `|q|² = q·conj(q)`.
    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::sqrt(self.norm_sqr())
    }

    /// Largest absolute component.
    #[inline]
    pub fn max_abs(self) -> f64 {
        self.w.abs().max(self.x.abs()).max(self.y.abs()).max(self.z.abs())
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// `conj(q)/|q|²`, refusing moduli at or below `1e−12·max(1, |q|_∞)`.
    pub fn inverse(self) -> Result<Self> {
        self.inverse_in_context(self.max_abs())
    }

    /// Inverse with the guard scaled by the magnitude of the surrounding
    /// computation rather than by `self`.
    pub fn inverse_in_context(self, context_scale: f64) -> Result<Self> {
        let n2 = self.norm_sqr();
        let n = math::sqrt(n2);
        let tau = INVERSE_TOLERANCE * context_scale.max(1.0);
        if !(n > tau) {
            return Err(Error::NearZeroQuaternion { modulus: n, at: None });
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// `e^{q·x}` by polar decomposition:
    /// `e^{wx}(cos(|v|x) + v̂ sin(|v|x))` with `v = Im q`.
    pub fn exp_qx(self, x: f64) -> Self {
        let v = self.imag();
        let vn = v.norm();
        let theta = vn * x;
        let radial = math::exp(self.w * x);
        // v̂ sin θ = v·x·(sin θ / θ)
        let (c, sinc) = if theta.abs() < EXP_SERIES_SWITCH {
            let t2 = theta * theta;
            (1.0 - t2 / 2.0 + t2 * t2 / 24.0, 1.0 - t2 / 6.0 + t2 * t2 / 120.0)
        } else {
            (math::cos(theta), math::sin(theta) / theta)
        };
        let s = x * sinc;
        Quaternion::new(radial * c, radial * v.x * s, radial * v.y * s, radial * v.z * s)
    }

    /// `e^{q}`.
    #[inline]
    pub fn exp(self) -> Self {
        self.exp_qx(1.0)
    }

    /// Componentwise distance `|a − b|`.
    #[inline]
    pub fn dist(self, other: Quaternion) -> f64 {
        (self - other).norm()
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Quaternion::real(w)
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(c: [f64; 4]) -> Self {
        Quaternion::from_array(c)
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product; not commutative.
impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, o: Quaternion) -> Quaternion {
        let (a, b) = (self, o);
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn div(self, s: f64) -> Quaternion {
        self.scale(1.0 / s)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    #[inline]
    fn mul_assign(&mut self, o: Quaternion) {
        *self = *self * o;
    }
}

impl core::iter::Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Self {
        iter.fold(Quaternion::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = [(self.w, ""), (self.x, "i"), (self.y, "j"), (self.z, "k")];
        for (n, (value, unit)) in parts.into_iter().enumerate() {
            // -0.0 prints as 0
            let value = if value == 0.0 { 0.0 } else { value };
            let sign = if value.is_sign_negative() { "-" } else if n > 0 { "+" } else { "" };
            f.write_str(sign)?;
            match f.precision() {
                Some(p) => write!(f, "{:.*}", p, value.abs())?,
                // scientific notation keeps tiny and huge components short
                None if value != 0.0 && !(1e-4..1e16).contains(&value.abs()) => write!(f, "{:e}", value.abs())?,
                None => write!(f, "{}", value.abs())?,
            }
            f.write_str(unit)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseQuaternionError {
    pub position: usize,
    pub reason: &'static str,
}

impl fmt::Display for ParseQuaternionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse quaternion at byte {}: {}", self.position, self.reason)
    }
}

impl core::error::Error for ParseQuaternionError {}

/// Accepts a signed sum of terms, each a real literal optionally followed by
/// `i`, `j` or `k` (a bare unit means coefficient 1). Whitespace between
/// tokens is ignored. Repeated units accumulate.
impl FromStr for Quaternion {
    type Err = ParseQuaternionError;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut out = Quaternion::ZERO;
        let mut terms = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let err = |position, reason| ParseQuaternionError { position, reason };

        skip_ws(&mut pos);
        if pos == bytes.len() {
            return Err(err(pos, "empty input"));
        }
        while pos < bytes.len() {
            let mut sign = 1.0;
            let mut saw_sign = false;
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                if bytes[pos] == b'-' {
                    sign = -1.0;
                }
                saw_sign = true;
                pos += 1;
                skip_ws(&mut pos);
            }
            if !saw_sign && terms > 0 {
                return Err(err(pos, "expected '+' or '-' between terms"));
            }
            let start = pos;
            while pos < bytes.len() {
                let c = bytes[pos];
                let exponent_sign = (c == b'+' || c == b'-')
                    && pos > start
                    && matches!(bytes[pos - 1], b'e' | b'E');
                if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exponent_sign {
                    pos += 1;
                } else {
                    break;
                }
            }
            let coeff = if pos > start {
                s[start..pos].parse::<f64>().map_err(|_| err(start, "malformed number"))?
            } else {
                1.0
            };
            skip_ws(&mut pos);
            let unit = match bytes.get(pos) {
                Some(b'i') => Some(1),
                Some(b'j') => Some(2),
                Some(b'k') => Some(3),
                _ => None,
            };
            if unit.is_none() && pos == start {
                return Err(err(pos, "expected a number or unit"));
            }
            let value = sign * coeff;
            match unit {
                Some(1) => out.x += value,
                Some(2) => out.y += value,
                Some(3) => out.z += value,
                _ => out.w += value,
            }
            if unit.is_some() {
                pos += 1;
            }
            terms += 1;
            skip_ws(&mut pos);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    extern crate std;
    use super::*;
    use alloc::format;
    use core::f64::consts::PI;

    const E: f64 = 1e-12;
    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;
    const ONE: Quaternion = Quaternion::ONE;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        a.dist(b) <= tol
    }

    #[test]
    fn basis_table() {
        let m = -ONE;
        let basis = [ONE, I, J, K];
        // row * column
        let table = [
            [ONE, I, J, K],
            [I, m, K, -J],
            [J, -K, m, I],
            [K, J, -I, m],
        ];
        for (r, a) in basis.iter().enumerate() {
            for (c, b) in basis.iter().enumerate() {
                assert_eq!(*a * *b, table[r][c], "{a} * {b}");
            }
        }
        assert_eq!(I * J * K, m);
    }

    #[test]
    fn product_examples() {
        assert_eq!(I * J, K);
        let q = Quaternion::new(0.3, -1.2, 2.0, 0.7);
        assert_eq!(ONE * q, q);
        assert_eq!(I * (J - I) - (I - J) * I, Quaternion::real(2.0));
    }

    #[test]
    fn conjugation() {
        assert_eq!((ONE + I).conj(), ONE - I);
        assert_eq!(K.conj(), -K);
        assert_eq!((I * J).conj(), J.conj() * I.conj());
        assert_eq!((I * J).conj(), -K);
        let q = Quaternion::new(1.0, -2.0, 3.0, 0.5);
        let n = q * q.conj();
        assert_eq!(n, Quaternion::real(q.norm_sqr()));
    }

    #[test]
    fn inverses() {
        assert_eq!(I.inverse().unwrap(), -I);
        let q = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(q.inverse().unwrap(), Quaternion::new(1.0, -1.0, -1.0, -1.0) / 4.0);
        assert!(matches!(
            Quaternion::ZERO.inverse(),
            Err(Error::NearZeroQuaternion { .. })
        ));
        let tiny = Quaternion::new(1e-9, 0.0, 0.0, 0.0);
        assert!(close(tiny.inverse().unwrap() * tiny, ONE, E));
        assert!(tiny.inverse_in_context(1e4).is_err());
        assert!(Quaternion::real(1e-13).inverse().is_err());
    }

    #[test]
    fn exponential_examples() {
        for x in [-3.0, 0.0, 0.4, 10.0] {
            assert_eq!(Quaternion::ZERO.exp_qx(x), ONE);
            let c = Quaternion::new(libm::cos(x), -libm::sin(x), 0.0, 0.0);
            assert!(close((-I).exp_qx(x), c, E));
        }
        let s2 = core::f64::consts::SQRT_2;
        for x in [0.0, 0.3, 1.0, 2.0, -1.7] {
            let got = ((I + J) / 2.0).exp_qx(x);
            let want = ONE * libm::cos(x / s2) + (I + J) / s2 * libm::sin(x / s2);
            assert!(close(got, want, E), "x={x}");
        }
        assert!(close((-I).exp_qx(PI), -ONE, E));
    }

    #[test]
    fn exponential_series_branch_is_continuous() {
        let q = Quaternion::new(0.2, 1.0, -2.0, 0.5);
        let vn = q.imag().norm();
        let x = 1e-4 / vn;
        let below = q.exp_qx(x * (1.0 - 1e-9));
        let above = q.exp_qx(x * (1.0 + 1e-9));
        assert!(close(below, above, 1e-12));
        // derivative at 0 is q
        let h = 1e-7;
        let d = (q.exp_qx(h) - q.exp_qx(-h)) / (2.0 * h);
        assert!(close(d, q, 1e-8));
    }

    #[test]
    fn display_and_parse() {
        let q = Quaternion::new(1.0, -2.5, 0.0, 3.0);
        assert_eq!(format!("{q}"), "1-2.5i+0j+3k");
        assert_eq!(format!("{:.2}", q), "1.00-2.50i+0.00j+3.00k");
        assert_eq!(format!("{}", Quaternion::new(-0.0, 0.0, -1.0, 0.0)), "0+0i-1j+0k");
        assert_eq!(format!("{}", Quaternion::new(1.5, 5e-17, -2e20, 0.0)), "1.5+5e-17i-2e20j+0k");
        assert_eq!("1-2.5i+0j+3k".parse::<Quaternion>().unwrap(), q);
        assert_eq!(" 1 - 2.5 i + 3k ".parse::<Quaternion>().unwrap(), q);
        assert_eq!("-i+j".parse::<Quaternion>().unwrap(), -I + J);
        assert_eq!("1e-3k".parse::<Quaternion>().unwrap(), K * 1e-3);
        assert_eq!("2.5E+1".parse::<Quaternion>().unwrap(), Quaternion::real(25.0));
        assert!("".parse::<Quaternion>().is_err());
        assert!("1 2".parse::<Quaternion>().is_err());
        assert!("1+".parse::<Quaternion>().is_err());
        assert!("1+q".parse::<Quaternion>().is_err());
    }
}
