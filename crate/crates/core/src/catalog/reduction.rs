use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use super::case::{degeneracy, ClassificationCase, Subcase};
use super::optimal::{param_f64, OptimalSystemElement, ParamValues};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::lie::VectorField;
use crate::special::{gamma_rational, int, to_f64};
use crate::symbolic::AlphaParameter;
use crate::verify::{EquationResidual, EvalPath, GridSpec, PairEvaluator, PairJets, ResidualReport};

/// Function of (x, t) evaluated on jets.
pub type Formula = Arc<dyn Fn(Jet, Jet) -> Jet + Send + Sync>;
/// Function of one variable evaluated on jets.
pub type Profile = Arc<dyn Fn(Jet) -> Jet + Send + Sync>;

/// `u = pu·φ(z) + qu`, `v = pv·ψ(z) + qv` with `z = z(x, t)`.
#[derive(Clone)]
pub struct InvariantForm {
    pub z: Formula,
    pub pu: Formula,
    pub qu: Formula,
    pub pv: Formula,
    pub qv: Formula,
}

fn zero() -> Formula {
    Arc::new(|_, _| Jet::constant(0.0))
}

fn one() -> Formula {
    Arc::new(|_, _| Jet::constant(1.0))
}

impl InvariantForm {
    pub fn evaluate(&self, phi: &dyn Fn(Jet) -> Jet, psi: &dyn Fn(Jet) -> Jet, x: Jet, t: Jet) -> (Jet, Jet) {
        let z = (self.z)(x, t);
        let u = (self.pu)(x, t) * phi(z) + (self.qu)(x, t);
        let v = (self.pv)(x, t) * psi(z) + (self.qv)(x, t);
        (u, v)
    }

    /// The pair obtained by inserting concrete profiles.
    pub fn compose(&self, phi: Profile, psi: Profile) -> FormPair {
        FormPair { form: self.clone(), phi, psi }
    }
}

pub struct FormPair {
    form: InvariantForm,
    phi: Profile,
    psi: Profile,
}

impl PairEvaluator for FormPair {
    fn jets(&self, x: f64, t: f64) -> Result<PairJets> {
        let along_x = self.form.evaluate(&*self.phi, &*self.psi, Jet::variable(x), Jet::constant(t));
        let along_t = self.form.evaluate(&*self.phi, &*self.psi, Jet::constant(x), Jet::variable(t));
        let out = PairJets { ux: along_x.0, vx: along_x.1, ut: along_t.0, vt: along_t.1 };
        if ![out.ux, out.vx, out.ut, out.vt].iter().all(|j| j.is_finite()) {
            return Err(Error::Domain(format!("invariant form not finite at x = {x}, t = {t}")));
        }
        Ok(out)
    }
}

/// Reduced system for a similarity variable.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReducedSystem {
    /// `D^α φ = A1 ψ + A2 z ψ' + E z^{α-1}`,
    /// `D^α ψ = b²(φ)(B1 φ + B2 z φ')`, or `D^α ψ = 0` when `second_zero`.
    Fractional { a1: f64, a2: f64, e: f64, b1: f64, b2: f64, second_zero: bool },
    /// `ψ' = g1 φ`, `b²(φ) φ' = g2 ψ + c`.
    Classical { g1: f64, g2: f64, c: f64 },
}

#[derive(Clone, Serialize)]
pub struct SimilarityReduction {
    pub element_id: String,
    pub z_text: String,
    pub u_text: String,
    pub v_text: String,
    pub reduced: ReducedSystem,
    pub reduced_text: [String; 2],
    pub validity: String,
    #[serde(skip)]
    pub form: InvariantForm,
}

pub enum ReductionOutcome {
    Reduction(Box<SimilarityReduction>),
    NoInvariantSolutions,
}

impl ReductionOutcome {
    pub fn into_reduction(self) -> Result<SimilarityReduction> {
        match self {
            ReductionOutcome::Reduction(r) => Ok(*r),
            ReductionOutcome::NoInvariantSolutions => {
                Err(Error::Unsupported("element has no invariant solutions".into()))
            }
        }
    }
}

fn pow_x(p: f64) -> Formula {
    Arc::new(move |x: Jet, _| x.powf(p))
}

fn pow_t(p: f64) -> Formula {
    Arc::new(move |_, t: Jet| t.powf(p))
}

/// U1 of every case: z = t, u = φ(t), v = ψ(t) + a x t^{α-1}.
fn translation_reduction(id: &str, alpha: f64, a: f64) -> SimilarityReduction {
    SimilarityReduction {
        element_id: id.to_string(),
        z_text: "t".into(),
        u_text: "φ(t)".into(),
        v_text: "ψ(t) + a·x·t^(α-1)".into(),
        reduced: ReducedSystem::Fractional { a1: 0.0, a2: 0.0, e: a, b1: 0.0, b2: 0.0, second_zero: true },
        reduced_text: ["D^α φ = a·t^(α-1)".into(), "D^α ψ = 0".into()],
        validity: "none".into(),
        form: InvariantForm {
            z: Arc::new(|_, t| t),
            pu: one(),
            qu: zero(),
            pv: one(),
            qv: Arc::new(move |x, t| x * t.powf(alpha - 1.0) * a),
        },
    }
}

/// Generic fractional reduced system with coefficients given as rationals.
fn fractional(a1: &BigRational, a2: &BigRational, e: &BigRational, b1: &BigRational, b2: &BigRational) -> ReducedSystem {
    ReducedSystem::Fractional {
        a1: to_f64(a1),
        a2: to_f64(a2),
        e: to_f64(e),
        b1: to_f64(b1),
        b2: to_f64(b2),
        second_zero: false,
    }
}

fn fractional_text(a1: &BigRational, a2: &BigRational, e: &BigRational, b1: &BigRational, b2: &BigRational, coupling: &str) -> [String; 2] {
    let mut first = format!("D^α φ = ({a1})·ψ + ({a2})·z·ψ'");
    if !num_traits::Zero::is_zero(e) {
        first.push_str(&format!(" + ({e})·z^(α-1)"));
    }
    [first, format!("D^α ψ = {coupling}·(({b1})·φ + ({b2})·z·φ')")]
}

/// The regular power-law (Case 2.1) forms, written for explicit `(α, m)`
/// so that they can also be evaluated on the degenerate line.
pub fn case21_form(index: usize, alpha: &BigRational, m: &BigRational, a: &BigRational) -> Result<InvariantForm> {
    let (al, mf, af) = (to_f64(alpha), to_f64(m), to_f64(a));
    let one_r = int(1);
    Ok(match index {
        1 => translation_reduction("", al, af).form,
        2 => InvariantForm {
            z: Arc::new(move |x, t| t * (x * (af / al)).exp()),
            pu: Arc::new(move |x, _| (x * (af / mf)).exp()),
            qu: zero(),
            pv: Arc::new(move |x, _| (x * ((mf + 1.0) * af / mf)).exp() * af),
            qv: zero(),
        },
        3 => {
            let d = degeneracy(m, alpha);
            if num_traits::Zero::is_zero(&d) {
                return Err(Error::DegenerateDenominator);
            }
            let zx = to_f64(&(-(m + &one_r) / &d));
            let ux = to_f64(&((alpha - &one_r) / &d));
            let vx = to_f64(&((m + &one_r) * (alpha - &one_r) / &d));
            let lc = to_f64(&(a / &d));
            InvariantForm {
                z: Arc::new(move |x, t| t * x.powf(zx)),
                pu: pow_x(ux),
                qu: zero(),
                pv: pow_x(vx),
                qv: Arc::new(move |x, t| t.powf(al - 1.0) * x.ln() * lc),
            }
        }
        4 => {
            let zx = to_f64(&((a - &one_r) / alpha));
            let ux = to_f64(&(a / m));
            let vx = to_f64(&((m + &one_r) * a / m));
            InvariantForm { z: Arc::new(move |x, t| t * x.powf(zx)), pu: pow_x(ux), qu: zero(), pv: pow_x(vx), qv: zero() }
        }
        5 => InvariantForm {
            z: Arc::new(|x, _| x),
            pu: pow_t(to_f64(&(-alpha / m))),
            qu: zero(),
            pv: pow_t(to_f64(&(-(m + &one_r) * alpha / m))),
            qv: zero(),
        },
        _ => return Err(Error::InvalidInput(format!("Case 2.1 has no invariant form U{index}"))),
    })
}

/// The degenerate power-law (Case 2.2) forms.
pub fn case22_form(index: usize, alpha: &BigRational, params: &ParamValues) -> Result<InvariantForm> {
    let al = to_f64(alpha);
    Ok(match index {
        1 => translation_reduction("", al, param_f64(params, "a")).form,
        2 => {
            let (a1, a2) = (param_f64(params, "a1"), param_f64(params, "a2"));
            InvariantForm {
                z: Arc::new(move |x, t| t * (x * (a2 / al)).exp()),
                pu: Arc::new(move |x, _| (x * (a2 * (1.0 - 2.0 * al) / al)).exp()),
                qu: zero(),
                pv: Arc::new(move |x, _| (x * (a2 * (1.0 - al) / al)).exp() * a2),
                qv: Arc::new(move |x, t| x * t.powf(al - 1.0) * a1),
            }
        }
        3 => {
            let a = param_f64(params, "a");
            let zx = (a - 1.0) / al;
            InvariantForm {
                z: Arc::new(move |x, t| t * x.powf(zx)),
                pu: pow_x(a * (1.0 - 2.0 * al) / al),
                qu: zero(),
                pv: pow_x(a * (1.0 - al) / al),
                qv: zero(),
            }
        }
        4 => {
            let a = param_f64(params, "a");
            InvariantForm {
                z: Arc::new(|x, _| x),
                pu: pow_t(2.0 * al - 1.0),
                qu: zero(),
                pv: pow_t(al - 1.0),
                qv: Arc::new(move |_, t| t.powf(al - 1.0) * t.ln() * (-a * al)),
            }
        }
        _ => return Err(Error::InvalidInput(format!("Case 2.2 has no invariant form U{index}"))),
    })
}

/// The Case 1 scaling form: z = t x^{-1/α}, u = φ(z), v = ψ(z).
fn case1_scaling_form(alpha: f64) -> InvariantForm {
    InvariantForm { z: Arc::new(move |x, t| t * x.powf(-1.0 / alpha)), pu: one(), qu: zero(), pv: one(), qv: zero() }
}

/// `m < 0` or `m > α/(1-α)`.
pub fn u5_hypothesis(m: &BigRational, alpha: &BigRational) -> bool {
    m.is_negative() || *m > alpha / (int(1) - alpha)
}

/// Similarity variable, invariant form and reduced system of an element.
pub fn similarity_reduction(
    case: &ClassificationCase,
    alpha: &AlphaParameter,
    element: &OptimalSystemElement,
    params: &ParamValues,
) -> Result<ReductionOutcome> {
    case.check_alpha(alpha)?;
    element.check_params(params)?;
    if element.case != case.label() {
        return Err(Error::InvalidCase(format!("{} does not belong to Case {}", element.id, case.label())));
    }
    let al = alpha.value();
    let alf = alpha.as_f64();
    let id = element.id.clone();
    let a_r = params.get("a").cloned().unwrap_or_else(|| int(0));
    let coupling = if case.m().is_some() { "k²·φ^(2m)" } else { "b²(φ)" };
    let red = |z_text: &str, u_text: &str, v_text: &str, reduced, reduced_text, form| SimilarityReduction {
        element_id: id.clone(),
        z_text: z_text.into(),
        u_text: u_text.into(),
        v_text: v_text.into(),
        reduced,
        reduced_text,
        validity: "none".into(),
        form,
    };
    let out = match (case, element.index) {
        // Case 2.1 lists U1 as -X1 - aX2, which spans the same subalgebra
        (_, 1) => translation_reduction(&id, alf, to_f64(&a_r)),
        (ClassificationCase::Generic, 2) => {
            let c = -int(1) / al;
            let zr = int(0);
            red(
                "t·x^(-1/α)",
                "φ(z)",
                "ψ(z)",
                fractional(&zr, &c, &zr, &zr, &c),
                fractional_text(&zr, &c, &zr, &zr, &c, coupling),
                case1_scaling_form(alf),
            )
        }
        (ClassificationCase::PowerLaw { m, subcase: Subcase::Regular, .. }, i) => {
            let d = degeneracy(m, al);
            let one_r = int(1);
            match i {
                2 => {
                    let (a1, a2, b1, b2) = ((m + &one_r) / m, &one_r / al, &one_r / m, &one_r / al);
                    red(
                        "t·exp(a·x/α)",
                        "exp(a·x/m)·φ(z)",
                        "a·exp((m+1)·a·x/m)·ψ(z)",
                        fractional(&a1, &a2, &int(0), &b1, &b2),
                        fractional_text(&a1, &a2, &int(0), &b1, &b2, coupling),
                        case21_form(2, al, m, &a_r)?,
                    )
                }
                3 => {
                    let a1 = (m + &one_r) * (al - &one_r) / &d;
                    let a2 = -(m + &one_r) / &d;
                    let e = &a_r / &d;
                    let b1 = (al - &one_r) / &d;
                    red(
                        "t·x^(-(m+1)/(2mα+α-m))",
                        "x^((α-1)/(2mα+α-m))·φ(z)",
                        "x^((m+1)(α-1)/(2mα+α-m))·ψ(z) + a/(2mα+α-m)·t^(α-1)·ln(x)",
                        fractional(&a1, &a2, &e, &b1, &a2),
                        fractional_text(&a1, &a2, &e, &b1, &a2, coupling),
                        case21_form(3, al, m, &a_r)?,
                    )
                }
                4 => {
                    let a1 = (m + &one_r) * &a_r / m;
                    let a2 = (&a_r - &one_r) / al;
                    let b1 = &a_r / m;
                    red(
                        "t·x^((a-1)/α)",
                        "x^(a/m)·φ(z)",
                        "x^((m+1)·a/m)·ψ(z)",
                        fractional(&a1, &a2, &int(0), &b1, &a2),
                        fractional_text(&a1, &a2, &int(0), &b1, &a2, coupling),
                        case21_form(4, al, m, &a_r)?,
                    )
                }
                5 => {
                    if !u5_hypothesis(m, al) {
                        return Err(Error::HypothesisViolated(format!("U5 requires m < 0 or m > α/(1-α); m = {m}")));
                    }
                    let l1 = -al / m;
                    let l2 = -(m + &one_r) * al / m;
                    let l3 = -(int(2) * m + &one_r) * al / m;
                    let g1 = gamma_rational(&(&one_r + &l1))? / gamma_rational(&(&one_r + &l2))?;
                    let g2 = gamma_rational(&(&one_r + &l2))? / gamma_rational(&(&one_r + &l3))?;
                    let mut r = red(
                        "x",
                        "t^(-α/m)·φ(x)",
                        "t^(-(m+1)α/m)·ψ(x)",
                        ReducedSystem::Classical { g1, g2, c: 0.0 },
                        [
                            "ψ'(x) = Γ(1-α/m)/Γ(1-(m+1)α/m)·φ(x)".into(),
                            "k²·φ^(2m)·φ'(x) = Γ(1-(m+1)α/m)/Γ(1-(2m+1)α/m)·ψ(x)".into(),
                        ],
                        case21_form(5, al, m, &a_r)?,
                    );
                    r.validity = "m < 0 or m > α/(1-α)".into();
                    r
                }
                _ => return Ok(ReductionOutcome::NoInvariantSolutions),
            }
        }
        (ClassificationCase::PowerLaw { subcase: Subcase::Degenerate, .. }, i) => {
            let one_r = int(1);
            let two_a = int(2) * al;
            match i {
                2 => {
                    let a1p = params.get("a1").cloned().unwrap_or_else(|| int(0));
                    let (a1, a2) = ((&one_r - al) / al, &one_r / al);
                    let b1 = (&one_r - &two_a) / al;
                    red(
                        "t·exp(a2·x/α)",
                        "exp(a2·(1-2α)·x/α)·φ(z)",
                        "a2·exp(a2·(1-α)·x/α)·ψ(z) + a1·x·t^(α-1)",
                        fractional(&a1, &a2, &a1p, &b1, &a2),
                        fractional_text(&a1, &a2, &a1p, &b1, &a2, coupling),
                        case22_form(2, al, params)?,
                    )
                }
                3 => {
                    let a1 = &a_r * (&one_r - al) / al;
                    let a2 = (&a_r - &one_r) / al;
                    let b1 = &a_r * (&one_r - &two_a) / al;
                    red(
                        "t·x^((a-1)/α)",
                        "x^(a(1-2α)/α)·φ(z)",
                        "x^(a(1-α)/α)·ψ(z)",
                        fractional(&a1, &a2, &int(0), &b1, &a2),
                        fractional_text(&a1, &a2, &int(0), &b1, &a2, coupling),
                        case22_form(3, al, params)?,
                    )
                }
                4 => {
                    let g1 = gamma_rational(&two_a)? / gamma_rational(al)?;
                    let c = -to_f64(&a_r) * gamma_rational(&(al + &one_r))?;
                    red(
                        "x",
                        "t^(2α-1)·φ(x)",
                        "t^(α-1)·ψ(x) - a·α·t^(α-1)·ln(t)",
                        ReducedSystem::Classical { g1, g2: 0.0, c },
                        ["ψ'(x) = Γ(2α)/Γ(α)·φ(x)".into(), "k²·φ^(2α/(1-2α))·φ'(x) = -a·Γ(α+1)".into()],
                        case22_form(4, al, params)?,
                    )
                }
                _ => return Ok(ReductionOutcome::NoInvariantSolutions),
            }
        }
        _ => return Ok(ReductionOutcome::NoInvariantSolutions),
    };
    Ok(ReductionOutcome::Reduction(Box::new(out)))
}

/// Residuals of `ξ u_x + τ u_t - μ` and `ξ v_x + τ v_t - φ` over a grid.
pub fn invariance_surface_residual(
    field: &VectorField,
    pair: &dyn PairEvaluator,
    alpha: &BigRational,
    grid: &GridSpec,
) -> Result<ResidualReport> {
    let points = grid.points();
    let vals: Vec<(f64, f64)> = points
        .par_iter()
        .map(|&(x, t)| {
            let j = pair.jets(x, t)?;
            let (u, v) = (j.ux.v, j.vx.v);
            let c = field.evaluate(alpha, [x, t, u, v])?;
            Ok((c[0] * j.ux.d1 + c[1] * j.ut.d1 - c[2], c[0] * j.vx.d1 + c[1] * j.vt.d1 - c[3]))
        })
        .collect::<Result<_>>()?;
    let (ru, rv): (Vec<f64>, Vec<f64>) = vals.into_iter().unzip();
    Ok(ResidualReport {
        kind: "invariance-surface".into(),
        equations: vec![
            EquationResidual::from_values("ξu_x + τu_t - μ", &ru),
            EquationResidual::from_values("ξv_x + τv_t - φ", &rv),
        ],
        path: if pair.analytic() { EvalPath::Analytic } else { EvalPath::FiniteDifference },
        grid: Some(grid.clone()),
        params: [("alpha".to_string(), alpha.to_string())].into_iter().collect(),
    })
}

/// Smooth sample profiles used to test invariant forms.
pub fn sample_profiles() -> (Profile, Profile) {
    (
        Arc::new(|z: Jet| (z * 0.7).sin() + z * z * 0.1 + 1.5),
        Arc::new(|z: Jet| (z * -0.4).exp() + z * 0.3 - 0.2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::case::generators;
    use crate::catalog::optimal::{optimal_system, params};
    use crate::special::rat;

    fn alpha(n: i64, d: i64) -> AlphaParameter {
        AlphaParameter::from_ratio(n, d).unwrap()
    }

    /// Every catalog form solves the invariance surface condition of its
    /// own element for arbitrary profiles.
    #[test]
    fn forms_are_invariant_under_their_generators() {
        let cases = vec![
            (ClassificationCase::generic(), alpha(1, 3)),
            (ClassificationCase::power_law(int(1), int(2), &alpha(1, 3)).unwrap(), alpha(1, 3)),
            (ClassificationCase::power_law(int(2), rat(-1, 3), &alpha(2, 5)).unwrap(), alpha(2, 5)),
            (ClassificationCase::degenerate(int(1), &alpha(1, 3)).unwrap(), alpha(1, 3)),
            (ClassificationCase::degenerate(int(1), &alpha(3, 5)).unwrap(), alpha(3, 5)),
        ];
        let grid = GridSpec::new(0.6, 1.9, 5, 0.4, 1.7, 5).unwrap();
        let (phi, psi) = sample_profiles();
        for (case, a) in cases {
            let alg = generators(&case, &a).unwrap().algebra().unwrap();
            for el in optimal_system(&case, &a).unwrap() {
                let mut choices = vec![el.sample_params()];
                if el.params.iter().any(|p| p.range == super::super::optimal::ParamRange::Real) {
                    choices.push(el.params.iter().map(|p| (p.name.to_string(), match p.name {
                        "a2" => int(-1),
                        _ => rat(-2, 7),
                    })).collect());
                }
                for p in choices {
                    let outcome = match similarity_reduction(&case, &a, &el, &p) {
                        Ok(o) => o,
                        Err(Error::HypothesisViolated(_)) => continue,
                        Err(e) => panic!("{}: {e}", el.id),
                    };
                    let ReductionOutcome::Reduction(r) = outcome else { continue };
                    let field = alg.realize(&el.x_element(&p).unwrap());
                    let pair = r.form.compose(phi.clone(), psi.clone());
                    let rep = invariance_surface_residual(&field, &pair, a.value(), &grid).unwrap();
                    assert!(rep.max() < 1e-9, "{} {:?}: {}", el.id, p, rep.max());
                }
            }
        }
    }

    #[test]
    fn no_invariant_solutions_for_kernel_elements() {
        let a = alpha(1, 3);
        for (case, idx) in [
            (ClassificationCase::generic(), 3),
            (ClassificationCase::power_law(int(1), int(2), &a).unwrap(), 6),
            (ClassificationCase::degenerate(int(1), &a).unwrap(), 5),
        ] {
            let el = optimal_system(&case, &a).unwrap().remove(idx - 1);
            let out = similarity_reduction(&case, &a, &el, &params(&[])).unwrap();
            assert!(matches!(out, ReductionOutcome::NoInvariantSolutions));
        }
    }

    #[test]
    fn u5_hypothesis_enforced() {
        let a = alpha(1, 2);
        // α/(1-α) = 1 at α = 1/2
        let case = ClassificationCase::power_law(int(1), rat(1, 2), &a).unwrap();
        let el = optimal_system(&case, &a).unwrap().remove(4);
        assert!(matches!(similarity_reduction(&case, &a, &el, &params(&[])), Err(Error::HypothesisViolated(_))));
        assert!(u5_hypothesis(&int(2), &rat(1, 2)));
        assert!(u5_hypothesis(&rat(-1, 2), &rat(1, 2)));
    }

    #[test]
    fn equal_z_means_equal_profile_values() {
        // Case 1 U2: points with equal t x^{-1/α} carry equal (u, v)
        let form = case1_scaling_form(1.0 / 3.0);
        let (phi, psi) = sample_profiles();
        let (x1, t1) = (1.2f64, 0.9f64);
        let z = t1 * x1.powf(-3.0);
        let x2 = 0.8f64;
        let t2 = z * x2.powf(3.0);
        let p = form.evaluate(&*phi, &*psi, Jet::constant(x1), Jet::constant(t1));
        let q = form.evaluate(&*phi, &*psi, Jet::constant(x2), Jet::constant(t2));
        assert!((p.0.v - q.0.v).abs() < 1e-12 && (p.1.v - q.1.v).abs() < 1e-12);
    }
}
