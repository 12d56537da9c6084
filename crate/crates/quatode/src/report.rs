//! Machine-readable reports. Quaternions are `[w, x, y, z]` arrays here too.

use std::fmt::{self, Write as _};

use quatode_core::Quaternion;
use serde::{Deserialize, Serialize};

pub type Q = [f64; 4];

pub fn q(v: Quaternion) -> Q {
    v.to_array()
}

fn show(v: &Q) -> Quaternion {
    Quaternion::from_array(*v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: f64,
    pub value: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionReport {
    pub expression: String,
    pub samples: Vec<Sample>,
}

/// Resolution of `L_{−q} + R_{a−q}` used by reduction of order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub rank: usize,
    pub invertible: bool,
    /// `P_ker(1)`, the coefficient of the term linear in `x`.
    pub kernel_vector: Q,
}

/// A user-supplied pair of exponentials `(e^{px}, e^{sx})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisReport {
    pub exponents: [Q; 2],
    /// `|s² − as − b|` for each exponent.
    pub characteristic_defect: [f64; 2],
    pub solves_equation: [bool; 2],
    pub wronskian_modulus_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticularReport {
    /// `undetermined-coefficients` or `variation-of-parameters`.
    pub method: String,
    pub expression: Option<String>,
    pub samples: Vec<Sample>,
    pub max_residual: f64,
    /// Largest deviation of the variation-of-parameters solution from the
    /// reported one, when both are available.
    pub variation_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub pair: [String; 2],
    pub q1: Q,
    pub q2: Q,
    /// `|Ψ(x₀) − f|` and `|Ψ'(x₀) − g|` after fitting.
    pub initial_defect: [f64; 2],
    pub samples: Vec<Sample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub name: Option<String>,
    pub kind: String,
    pub a: Q,
    pub b: Q,
    pub x0: f64,
    pub phi: FunctionReport,
    pub xi: FunctionReport,
    pub reduction: ReductionReport,
    /// `|W|²` of `(φ, ξ)` at `x₀`.
    pub wronskian_modulus_squared: f64,
    pub basis: Option<BasisReport>,
    pub particular: Option<ParticularReport>,
    pub constants: Option<ConstantsReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantsReport {
    pub wl: Q,
    pub wr: Q,
    pub wl_tilde: Q,
    pub wr_tilde: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WronskianReport {
    pub name: Option<String>,
    pub x: f64,
    pub pair: [String; 2],
    /// Absent when `φ(x)` or `ξ(x)` is not invertible.
    pub variants: Option<VariantsReport>,
    pub modulus_squared: f64,
    pub modulus: f64,
    pub dieudonne_det_squared: f64,
    pub dependent: bool,
}

fn samples_line(out: &mut String, label: &str, samples: &[Sample]) {
    for s in samples {
        let _ = writeln!(out, "  {label}({}) = {}", s.x, show(&s.value));
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if let Some(name) = &self.name {
            let _ = writeln!(out, "scenario: {name}");
        }
        let _ = writeln!(out, "equation: Ψ'' = ({})Ψ' + ({})Ψ + ρ", show(&self.a), show(&self.b));
        let _ = writeln!(out, "phi = {}", self.phi.expression);
        let _ = writeln!(out, "xi  = {}", self.xi.expression);
        samples_line(&mut out, "xi", &self.xi.samples);
        let _ = writeln!(
            out,
            "reduction operator: rank {}, {}",
            self.reduction.rank,
            if self.reduction.invertible {
                "invertible".to_string()
            } else {
                format!("kernel term x·({})", show(&self.reduction.kernel_vector))
            }
        );
        let _ = writeln!(out, "|W|^2(phi, xi) at x0 = {}: {}", self.x0, self.wronskian_modulus_squared);
        if let Some(b) = &self.basis {
            let _ = writeln!(
                out,
                "basis exp[({})x], exp[({})x]: |W|^2 = {}",
                show(&b.exponents[0]),
                show(&b.exponents[1]),
                b.wronskian_modulus_squared
            );
            for (n, e) in b.exponents.iter().enumerate() {
                let verdict = if b.solves_equation[n] { "solves" } else { "does NOT solve" };
                let _ = writeln!(
                    out,
                    "  exp[({})x] {verdict} the equation (defect {:e})",
                    show(e),
                    b.characteristic_defect[n]
                );
            }
        }
        if let Some(p) = &self.particular {
            let _ = writeln!(out, "particular ({}):", p.method);
            if let Some(e) = &p.expression {
                let _ = writeln!(out, "  Psi_p = {e}");
            }
            samples_line(&mut out, "Psi_p", &p.samples);
            let _ = writeln!(out, "  max residual {:e}", p.max_residual);
            if let Some(d) = p.variation_deviation {
                let _ = writeln!(out, "  variation of parameters deviates by {d:e}");
            }
        }
        if let Some(c) = &self.constants {
            let _ = writeln!(out, "Psi = {}·q1 + {}·q2 + Psi_p", c.pair[0], c.pair[1]);
            let _ = writeln!(out, "  q1 = {}", show(&c.q1));
            let _ = writeln!(out, "  q2 = {}", show(&c.q2));
            let _ = writeln!(out, "  initial defect {:e}, {:e}", c.initial_defect[0], c.initial_defect[1]);
            samples_line(&mut out, "Psi", &c.samples);
        }
        f.write_str(out.trim_end())
    }
}

impl fmt::Display for WronskianReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            writeln!(f, "scenario: {name}")?;
        }
        writeln!(f, "pair: {}, {}", self.pair[0], self.pair[1])?;
        writeln!(f, "x = {}", self.x)?;
        match &self.variants {
            Some(v) => {
                writeln!(f, "  W_L  = {}", show(&v.wl))?;
                writeln!(f, "  W_R  = {}", show(&v.wr))?;
                writeln!(f, "  W~_L = {}", show(&v.wl_tilde))?;
                writeln!(f, "  W~_R = {}", show(&v.wr_tilde))?;
            }
            None => writeln!(f, "  variants undefined (phi or xi not invertible here)")?,
        }
        writeln!(f, "|W|^2 = {}", self.modulus_squared)?;
        writeln!(f, "|W|   = {}", self.modulus)?;
        writeln!(f, "Dieudonné det^2 = {}", self.dieudonne_det_squared)?;
        write!(f, "{}", if self.dependent { "linearly dependent" } else { "linearly independent" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> SolveReport {
        SolveReport {
            name: Some("round trip".into()),
            kind: "nonhomogeneous-const".into(),
            a: [0.0, 0.0, -1.0, 0.0],
            b: [-1.0, 0.0, 0.0, 1.0],
            x0: 0.0,
            phi: FunctionReport {
                expression: "exp[(0-1i+0j+0k)x]".into(),
                samples: vec![Sample { x: 0.5, value: [0.8775825618903728, -0.479425538604203, 0.0, 0.0] }],
            },
            xi: FunctionReport { expression: "xi".into(), samples: vec![] },
            reduction: ReductionReport { rank: 4, invertible: true, kernel_vector: [0.0; 4] },
            wronskian_modulus_squared: 0.9999999999999998,
            basis: Some(BasisReport {
                exponents: [[0.0, -1.0, 0.0, 0.0], [0.0, 1.0, -1.0, 0.0]],
                characteristic_defect: [0.0, 2.0],
                solves_equation: [true, false],
                wronskian_modulus_squared: 5.000000000000001,
            }),
            particular: Some(ParticularReport {
                method: "undetermined-coefficients".into(),
                expression: None,
                samples: vec![Sample { x: 1.0, value: [0.0, 0.5, 0.5, 0.5] }],
                max_residual: 1.2e-17,
                variation_deviation: Some(3.3e-10),
            }),
            constants: None,
        }
    }

    #[test]
    fn json_round_trip() {
        let r = sample_report();
        let text = serde_json::to_string_pretty(&r).unwrap();
        let back: SolveReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
    }

    #[test]
    fn human_text_mentions_the_pieces() {
        let text = sample_report().to_string();
        assert!(text.contains("|W|^2 = 5.000000000000001"));
        assert!(text.contains("does NOT solve"));
        assert!(text.contains("Psi_p(1) = 0+0.5i+0.5j+0.5k"));
    }
}
