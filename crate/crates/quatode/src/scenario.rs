//! Scenario files: JSON descriptions of one equation and what to do with it.
//!
//! Quaternions are 4-element arrays `[w, x, y, z]`. The equation is always
//! `Ψ'' = aΨ' + bΨ + ρ(x)` with constant `a`, `b` and polynomial forcing
//! `ρ = Σ x^m r_m`, written as `[[m, [w, x, y, z]], …]`.

use std::fs;
use std::path::Path;

use quatode_core::oracle::DEFAULT_STEP;
use quatode_core::solver::{ConstCoeffEq, Ivp};
use quatode_core::{QExpr, Quaternion};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Interval length used when `x_end` is omitted.
pub const DEFAULT_SPAN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    HomogeneousConst,
    NonhomogeneousConst,
    IvpNumeric,
    WronskianCheck,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::HomogeneousConst => "homogeneous-const",
            Kind::NonhomogeneousConst => "nonhomogeneous-const",
            Kind::IvpNumeric => "ivp-numeric",
            Kind::WronskianCheck => "wronskian-check",
        }
    }
}

/// The file as written, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<[f64; 4]>,
    /// Exponent of a known solution `e^{qx}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho: Vec<(u32, [f64; 4])>,
    /// Exponents `(p, s)` of a candidate pair `(e^{px}, e^{sx})`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<[[f64; 4]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<[f64; 4]>,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: Option<String>,
    pub kind: Kind,
    pub eq: ConstCoeffEq,
    pub q: Option<Quaternion>,
    pub rho: Vec<(u32, Quaternion)>,
    pub basis: Option<[Quaternion; 2]>,
    pub x0: f64,
    pub x_end: f64,
    pub h: f64,
    pub initial: Option<(Quaternion, Quaternion)>,
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(CliError::validation("kind", "scenario file is empty"));
        }
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.validate()
    }

    pub fn rho_expr(&self) -> QExpr {
        QExpr::polynomial(&self.rho)
    }

    pub fn ivp(&self) -> Option<Ivp> {
        let (f, g) = self.initial?;
        Some(self.eq.ivp(self.rho_expr(), self.x0, f, g))
    }

    /// `[min(x₀, x_end), max(x₀, x_end)]`.
    pub fn interval(&self) -> (f64, f64) {
        (self.x0.min(self.x_end), self.x0.max(self.x_end))
    }
}

fn finite_quaternion(field: &'static str, c: [f64; 4]) -> Result<Quaternion> {
    if c.iter().all(|x| x.is_finite()) {
        Ok(Quaternion::from_array(c))
    } else {
        Err(CliError::validation(field, "components must be finite"))
    }
}

fn quaternion(field: &'static str, v: Option<[f64; 4]>) -> Result<Option<Quaternion>> {
    v.map(|c| finite_quaternion(field, c)).transpose()
}

fn required(field: &'static str, kind: Kind, v: Option<Quaternion>) -> Result<Quaternion> {
    v.ok_or_else(|| CliError::validation(field, format!("required for kind `{}`", kind.as_str())))
}

fn finite(field: &'static str, v: Option<f64>, default: f64) -> Result<f64> {
    let v = v.unwrap_or(default);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::validation(field, "must be finite"))
    }
}

impl ScenarioFile {
    pub fn validate(self) -> Result<Scenario> {
        let kind = self.kind;
        let a = required("a", kind, quaternion("a", self.a)?)?;
        let b = required("b", kind, quaternion("b", self.b)?)?;
        let q = quaternion("q", self.q)?;
        let f = quaternion("f", self.f)?;
        let g = quaternion("g", self.g)?;
        let rho = self
            .rho
            .iter()
            .map(|&(m, c)| Ok((m, finite_quaternion("rho", c)?)))
            .collect::<Result<Vec<_>>>()?;
        let basis = match self.basis {
            None => None,
            Some([p, s]) => Some([finite_quaternion("basis", p)?, finite_quaternion("basis", s)?]),
        };
        let x0 = finite("x0", self.x0, 0.0)?;
        let x_end = finite("x_end", self.x_end, x0 + DEFAULT_SPAN)?;
        let h = finite("h", self.h, DEFAULT_STEP)?;
        if !(h > 0.0) {
            return Err(CliError::validation("h", "must be positive"));
        }
        if x_end == x0 {
            return Err(CliError::validation("x_end", "must differ from x0"));
        }
        let initial = match (f, g) {
            (Some(f), Some(g)) => Some((f, g)),
            (None, None) => None,
            (Some(_), None) => return Err(CliError::validation("g", "must be given together with `f`")),
            (None, Some(_)) => return Err(CliError::validation("f", "must be given together with `g`")),
        };
        match kind {
            Kind::HomogeneousConst => {
                required("q", kind, q)?;
                if !rho.is_empty() {
                    return Err(CliError::validation(
                        "rho",
                        "must be empty for kind `homogeneous-const`; use `nonhomogeneous-const`",
                    ));
                }
            }
            Kind::NonhomogeneousConst => {
                required("q", kind, q)?;
                if rho.is_empty() {
                    return Err(CliError::validation("rho", "required for kind `nonhomogeneous-const`"));
                }
            }
            Kind::IvpNumeric => {
                if initial.is_none() {
                    return Err(CliError::validation("f", "`f` and `g` are required for kind `ivp-numeric`"));
                }
            }
            Kind::WronskianCheck => {
                if q.is_none() && basis.is_none() {
                    return Err(CliError::validation("basis", "either `basis` or `q` is required for kind `wronskian-check`"));
                }
            }
        }
        Ok(Scenario {
            name: self.name,
            kind,
            eq: ConstCoeffEq::new(a, b),
            q,
            rho,
            basis,
            x0,
            x_end,
            h,
            initial,
        })
    }
}
