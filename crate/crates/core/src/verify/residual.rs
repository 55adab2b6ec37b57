use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

use super::report::{EquationResidual, EvalPath, GridSpec, PairEvaluator, ResidualReport};
use super::rl_numeric::SingularRule;
use crate::catalog::{Profile, ReducedSystem, SimilarityReduction};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::solutions::{power_rule_factor, Component, Coupling, SolutionFamily};
use crate::special::to_f64;
use crate::symbolic::{rl_derivative_t, AlphaParameter, ExponentExpr, MonomialSum, Var};

/// How fractional derivatives are obtained in a residual scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathChoice {
    /// Exact power rule when every component allows it, quadrature otherwise.
    Auto,
    Exact,
    Quadrature,
}

const RULE_NODES: usize = 16;
const RULE_TOL: f64 = 1e-7;

/// Evaluates `D^α` of one component at fixed x.
enum FracEval {
    Exact(Vec<f64>),
    Numeric(SingularRule, SingularRule),
}

impl FracEval {
    fn new(c: &Component, alpha: &AlphaParameter, exact: bool) -> Result<Self> {
        if exact {
            Ok(FracEval::Exact(c.terms.iter().map(|t| power_rule_factor(&t.exponent, alpha)).collect::<Result<_>>()?))
        } else {
            let a = alpha.as_f64();
            Ok(FracEval::Numeric(
                SingularRule::new(a, c.hint, RULE_NODES)?,
                SingularRule::new(a, c.hint, RULE_NODES + RULE_NODES / 2)?,
            ))
        }
    }

    fn eval(&self, c: &Component, alpha: f64, x: f64, t: f64) -> Result<f64> {
        match self {
            FracEval::Exact(factors) => Ok(c
                .terms
                .iter()
                .zip(factors)
                .map(|(term, f)| {
                    if *f == 0.0 {
                        0.0
                    } else {
                        f * (term.coeff)(Jet::constant(x)).v * t.powf(to_f64(&term.exponent) - alpha)
                    }
                })
                .sum()),
            FracEval::Numeric(coarse, fine) => {
                let xj = Jet::constant(x);
                let f = |s: f64| -> Result<f64> {
                    let v = c.eval(xj, Jet::constant(s)).v;
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::Domain(format!("component not finite at x = {x}, t = {s}")))
                    }
                };
                let a = coarse.rl_derivative(&f, t)?;
                let b = fine.rl_derivative(&f, t)?;
                if (a - b).abs() > RULE_TOL * b.abs().max(1.0) {
                    return Err(Error::QuadratureFailure(format!("refinements disagree at x = {x}, t = {t}: {a} vs {b}")));
                }
                Ok(b)
            }
        }
    }
}

fn family_params(family: &SolutionFamily) -> BTreeMap<String, String> {
    let mut p = family.params.clone();
    p.insert("family".into(), family.id.clone());
    p.insert("alpha".into(), family.alpha.to_string());
    p.insert("coupling".into(), family.coupling.describe());
    p
}

fn resolve_path(family: &SolutionFamily, path: PathChoice) -> Result<bool> {
    match path {
        PathChoice::Auto => Ok(family.is_monomial()),
        PathChoice::Quadrature => Ok(false),
        PathChoice::Exact if family.is_monomial() => Ok(true),
        PathChoice::Exact => Err(Error::Unsupported(format!("family {} has no exact monomial form in t", family.id))),
    }
}

/// `|D^α u - v_x|` and `|D^α v - b²(u) u_x|` over the grid.
pub fn residual_system(family: &SolutionFamily, grid: &GridSpec, path: PathChoice) -> Result<ResidualReport> {
    let exact = resolve_path(family, path)?;
    let alpha = family.alpha_f64();
    let fu = FracEval::new(&family.u, &family.alpha, exact)?;
    let fv = FracEval::new(&family.v, &family.alpha, exact)?;
    let rows: Vec<(f64, f64)> = grid
        .points()
        .par_iter()
        .map(|&(x, t)| -> Result<(f64, f64)> {
            let j = family.jets(x, t)?;
            let du = fu.eval(&family.u, alpha, x, t)?;
            let dv = fv.eval(&family.v, alpha, x, t)?;
            let b2 = family.coupling.b_squared(j.ux).v;
            Ok((du - j.vx.d1, dv - b2 * j.ux.d1))
        })
        .collect::<Result<_>>()?;
    let (r1, r2): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    Ok(ResidualReport {
        kind: "system".into(),
        equations: vec![
            EquationResidual::from_values("D^α u = v_x", &r1),
            EquationResidual::from_values("D^α v = b²(u)·u_x", &r2),
        ],
        path: if exact { EvalPath::ExactMonomial } else { EvalPath::Quadrature },
        grid: Some(grid.clone()),
        params: family_params(family),
    })
}

/// `D^α D^α u = (b²(u) u_x)_x` with both fractional derivatives taken by the
/// power rule.
pub fn sequential_residual(family: &SolutionFamily, grid: &GridSpec) -> Result<ResidualReport> {
    if !family.u.is_monomial() {
        return Err(Error::Unsupported(format!("u of family {} is not a finite sum of powers of t", family.id)));
    }
    let alpha = &family.alpha;
    let mut twice = Vec::new();
    for term in &family.u.terms {
        let f = MonomialSum::power(Var::T, ExponentExpr::constant(term.exponent.clone()));
        let g = rl_derivative_t(&f, alpha)?.rl_derivative_t(alpha).map_err(|e| match e {
            Error::UndefinedDerivative { exponent } => {
                Error::Unsupported(format!("intermediate exponent {exponent} is not above -1"))
            }
            other => other,
        })?;
        twice.push(g);
    }
    let rows: Vec<f64> = grid
        .points()
        .par_iter()
        .map(|&(x, t)| -> Result<f64> {
            let j = family.jets(x, t)?;
            let mut lhs = 0.0;
            for (term, g) in family.u.terms.iter().zip(&twice) {
                let c = (term.coeff)(Jet::constant(x)).v;
                if c != 0.0 {
                    lhs += c * g.evaluate(alpha.value(), [x, t, 0.0, 0.0])?;
                }
            }
            let b2 = family.coupling.b_squared(j.ux);
            Ok(lhs - (b2.d1 * j.ux.d1 + b2.v * j.ux.d2))
        })
        .collect::<Result<_>>()?;
    Ok(ResidualReport {
        kind: "sequential".into(),
        equations: vec![EquationResidual::from_values("D^α D^α u = (b²(u)·u_x)_x", &rows)],
        path: EvalPath::ExactMonomial,
        grid: Some(grid.clone()),
        params: family_params(family),
    })
}

/// A profile of the similarity variable.
#[derive(Clone)]
pub enum ReducedProfile {
    /// `coeff·z^exponent`.
    Power { coeff: f64, exponent: BigRational },
    /// Arbitrary profile with leading behaviour `z^hint` at 0.
    General { f: Profile, hint: f64 },
}

impl ReducedProfile {
    pub fn zero() -> Self {
        ReducedProfile::Power { coeff: 0.0, exponent: BigRational::from_integer(0.into()) }
    }

    pub fn jet(&self, z: Jet) -> Jet {
        match self {
            ReducedProfile::Power { coeff, exponent } => z.powf(to_f64(exponent)).scale(*coeff),
            ReducedProfile::General { f, .. } => f(z),
        }
    }

    fn fractional(&self, z: f64, alpha: &AlphaParameter) -> Result<(f64, bool)> {
        match self {
            ReducedProfile::Power { coeff, exponent } => {
                if *coeff == 0.0 {
                    return Ok((0.0, true));
                }
                let factor = power_rule_factor(exponent, alpha)?;
                Ok((coeff * factor * z.powf(to_f64(exponent) - alpha.as_f64()), true))
            }
            ReducedProfile::General { f, hint } => {
                let rule = SingularRule::new(alpha.as_f64(), *hint, RULE_NODES)?;
                let g = |s: f64| Ok(f(Jet::constant(s)).v);
                Ok((rule.rl_derivative(&g, z)?, false))
            }
        }
    }
}

/// Residuals of a reduced ODE pair on positive z nodes.
pub fn reduced_ode_residual(
    reduction: &SimilarityReduction,
    coupling: &Coupling,
    alpha: &AlphaParameter,
    phi: &ReducedProfile,
    psi: &ReducedProfile,
    zs: &[f64],
) -> Result<ResidualReport> {
    let mut exact_all = true;
    let mut r1 = Vec::with_capacity(zs.len());
    let mut r2 = Vec::with_capacity(zs.len());
    let al = alpha.as_f64();
    let fractional = matches!(reduction.reduced, ReducedSystem::Fractional { .. });
    for &z in zs {
        if fractional && !(z > 0.0) {
            return Err(Error::Domain(format!("reduced residual needs z > 0, got {z}")));
        }
        let (p, q) = (phi.jet(Jet::variable(z)), psi.jet(Jet::variable(z)));
        let b2 = coupling.b_squared(p).v;
        match reduction.reduced {
            ReducedSystem::Fractional { a1, a2, e, b1, b2: bb2, second_zero } => {
                let (dp, ep) = phi.fractional(z, alpha)?;
                let (dq, eq) = psi.fractional(z, alpha)?;
                exact_all &= ep && eq;
                r1.push(dp - (a1 * q.v + a2 * z * q.d1 + e * z.powf(al - 1.0)));
                let rhs = if second_zero { 0.0 } else { b2 * (b1 * p.v + bb2 * z * p.d1) };
                r2.push(dq - rhs);
            }
            ReducedSystem::Classical { g1, g2, c } => {
                r1.push(q.d1 - g1 * p.v);
                r2.push(b2 * p.d1 - (g2 * q.v + c));
            }
        }
    }
    let path = if !fractional {
        EvalPath::Analytic
    } else if exact_all {
        EvalPath::ExactMonomial
    } else {
        EvalPath::Quadrature
    };
    let mut params = BTreeMap::new();
    params.insert("element".into(), reduction.element_id.clone());
    params.insert("alpha".into(), alpha.to_string());
    Ok(ResidualReport {
        kind: "reduced".into(),
        equations: vec![
            EquationResidual::from_values(&reduction.reduced_text[0], &r1),
            EquationResidual::from_values(&reduction.reduced_text[1], &r2),
        ],
        path,
        grid: None,
        params,
    })
}
