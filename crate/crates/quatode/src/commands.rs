//! The work behind each subcommand, independent of argument parsing.

use quatode_core::oracle::{self, RealSystem};
use quatode_core::solver::{
    fit_initial_conditions, polynomial_particular, reduce_order, reduction_operator, variation_of_parameters,
    Particular,
};
use quatode_core::wronskian::FundamentalPair;
use quatode_core::{Error, QExpr, Quaternion};

use crate::error::{CliError, Result};
use crate::report::{
    q, BasisReport, ConstantsReport, FunctionReport, ParticularReport, ReductionReport, Sample, SolveReport,
    VariantsReport, WronskianReport,
};
use crate::scenario::{Kind, Scenario};
use crate::trajectory::TrajectoryTable;

/// Points at which reports sample functions: five equispaced points from
/// `x₀` to `x_end`.
pub fn sample_points(s: &Scenario) -> Vec<f64> {
    (0..=4).map(|n| s.x0 + (s.x_end - s.x0) * n as f64 / 4.0).collect()
}

const RESIDUAL_POINTS: usize = 100;

fn sample_expr(e: &QExpr, xs: &[f64]) -> Vec<Sample> {
    xs.iter().map(|&x| Sample { x, value: q(e.eval(x)) }).collect()
}

fn sample_particular(p: &Particular, xs: &[f64]) -> Result<Vec<Sample>> {
    xs.iter()
        .map(|&x| Ok(Sample { x, value: q(p.jet(x)?.value) }))
        .collect()
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |k| lo + (hi - lo) * k as f64 / n as f64)
}

fn known_exponent(s: &Scenario) -> Result<Quaternion> {
    s.q.ok_or_else(|| CliError::validation("q", format!("required for kind `{}`", s.kind.as_str())))
}

fn basis_report(s: &Scenario, basis: [Quaternion; 2]) -> BasisReport {
    let defect = basis.map(|e| s.eq.characteristic(e).norm());
    BasisReport {
        exponents: basis.map(q),
        characteristic_defect: defect,
        solves_equation: basis.map(|e| s.eq.admits_exponential(e)),
        wronskian_modulus_squared: FundamentalPair::exponentials(basis[0], basis[1]).modulus_squared(s.x0),
    }
}

/// The pair used for forcing and constants: the supplied basis when both
/// exponentials solve the equation and are independent, otherwise `φ` with
/// the reduction-of-order partner shifted by `φ` so it does not vanish at 0.
fn working_pair(s: &Scenario, phi: &QExpr, xi: &QExpr) -> (QExpr, QExpr) {
    if let Some([p, r]) = s.basis {
        let admitted = s.eq.admits_exponential(p) && s.eq.admits_exponential(r);
        if admitted && !FundamentalPair::exponentials(p, r).dependence_test(s.x0) {
            return (QExpr::exp(p), QExpr::exp(r));
        }
    }
    (phi.clone(), QExpr::sum(vec![xi.clone(), phi.clone()]))
}

fn max_residual(p: &Particular, s: &Scenario) -> Result<f64> {
    let ivp = s.eq.ivp(s.rho_expr(), s.x0, Quaternion::ZERO, Quaternion::ZERO);
    let (lo, hi) = s.interval();
    let mut worst = 0.0_f64;
    for x in grid(lo, hi, RESIDUAL_POINTS) {
        worst = worst.max(oracle::residual_of_jet(&p.jet(x)?, &ivp, x).norm());
    }
    Ok(worst)
}

fn particular(s: &Scenario, pair: &(QExpr, QExpr), xs: &[f64]) -> Result<(Particular, ParticularReport)> {
    let rho = s.rho_expr();
    let (lo, hi) = s.interval();
    match polynomial_particular(&s.eq, &s.rho) {
        Ok(poly) => {
            let expression = poly.to_string();
            let exact = Particular::from(poly);
            // cross-check against variation of parameters when the pair allows it
            let deviation = variation_of_parameters(&pair.0, &pair.1, &rho, s.x0, lo, hi)
                .and_then(|vr| {
                    let at = exact.jet(s.x0)?;
                    let anchored = vr.particular.anchored(s.x0, at.value, at.d1)?;
                    grid(lo, hi, RESIDUAL_POINTS).try_fold(0.0_f64, |worst, x| {
                        Ok(worst.max(anchored.eval(x)?.dist(exact.jet(x)?.value)))
                    })
                })
                .ok();
            let report = ParticularReport {
                method: "undetermined-coefficients".into(),
                expression: Some(expression),
                samples: sample_particular(&exact, xs)?,
                max_residual: max_residual(&exact, s)?,
                variation_deviation: deviation,
            };
            Ok((exact, report))
        }
        Err(Error::NearZeroQuaternion { .. }) => {
            let vr = variation_of_parameters(&pair.0, &pair.1, &rho, s.x0, lo, hi)?;
            let p = Particular::from(vr.particular);
            let report = ParticularReport {
                method: "variation-of-parameters".into(),
                expression: None,
                samples: sample_particular(&p, xs)?,
                max_residual: max_residual(&p, s)?,
                variation_deviation: None,
            };
            Ok((p, report))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn solve(s: &Scenario) -> Result<SolveReport> {
    if !matches!(s.kind, Kind::HomogeneousConst | Kind::NonhomogeneousConst) {
        return Err(CliError::validation(
            "kind",
            "`solve` needs kind `homogeneous-const` or `nonhomogeneous-const`",
        ));
    }
    let qexp = known_exponent(s)?;
    let phi = QExpr::exp(qexp);
    let xi = reduce_order(&s.eq, qexp)?;
    let res = reduction_operator(&s.eq, qexp).resolve();
    let xs = sample_points(s);
    let pair = working_pair(s, &phi, &xi);
    let (part, part_report) = if s.rho.is_empty() {
        (Particular::None, None)
    } else {
        let (p, r) = particular(s, &pair, &xs)?;
        (p, Some(r))
    };
    let constants = match s.initial {
        None => None,
        Some((f, g)) => {
            let sol = fit_initial_conditions(&pair.0, &pair.1, part, s.x0, f, g)?;
            let at = sol.jet(s.x0)?;
            Some(ConstantsReport {
                pair: [pair.0.to_string(), pair.1.to_string()],
                q1: q(sol.q1),
                q2: q(sol.q2),
                initial_defect: [at.value.dist(f), at.d1.dist(g)],
                samples: xs
                    .iter()
                    .map(|&x| Ok(Sample { x, value: q(sol.eval(x)?) }))
                    .collect::<Result<_>>()?,
            })
        }
    };
    Ok(SolveReport {
        name: s.name.clone(),
        kind: s.kind.as_str().into(),
        a: q(s.eq.a),
        b: q(s.eq.b),
        x0: s.x0,
        phi: FunctionReport { expression: phi.to_string(), samples: sample_expr(&phi, &xs) },
        xi: FunctionReport { expression: xi.to_string(), samples: sample_expr(&xi, &xs) },
        reduction: ReductionReport {
            rank: res.rank,
            invertible: res.invertible,
            kernel_vector: q(res.ker_proj.apply(Quaternion::ONE)),
        },
        wronskian_modulus_squared: FundamentalPair::new(phi, xi).modulus_squared(s.x0),
        basis: s.basis.map(|b| basis_report(s, b)),
        particular: part_report,
        constants,
    })
}

pub fn wronskian(s: &Scenario, x: f64) -> Result<WronskianReport> {
    if !x.is_finite() {
        return Err(CliError::validation("x", "must be finite"));
    }
    let (phi, xi) = match s.basis {
        Some([p, r]) => (QExpr::exp(p), QExpr::exp(r)),
        None => {
            let qexp = known_exponent(s)?;
            (QExpr::exp(qexp), reduce_order(&s.eq, qexp)?)
        }
    };
    let pair = FundamentalPair::new(phi.clone(), xi.clone());
    let variants = match pair.variants(x) {
        Ok(v) => Some(VariantsReport { wl: q(v.wl), wr: q(v.wr), wl_tilde: q(v.wl_tilde), wr_tilde: q(v.wr_tilde) }),
        Err(Error::NearZeroQuaternion { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(WronskianReport {
        name: s.name.clone(),
        x,
        pair: [phi.to_string(), xi.to_string()],
        variants,
        modulus_squared: pair.modulus_squared(x),
        modulus: pair.modulus(x),
        dieudonne_det_squared: pair.dieudonne_det_squared(x),
        dependent: pair.dependence_test(x),
    })
}

pub fn integrate(s: &Scenario, h: Option<f64>) -> Result<TrajectoryTable> {
    let ivp = s
        .ivp()
        .ok_or_else(|| CliError::validation("f", "`f` and `g` are required to integrate"))?;
    let h = h.unwrap_or(s.h);
    if !(h > 0.0) || !h.is_finite() {
        return Err(CliError::validation("h", "must be positive and finite"));
    }
    let traj = RealSystem::new(&ivp).integrate(s.x_end, h)?;
    Ok(TrajectoryTable::new(&traj, &ivp))
}
