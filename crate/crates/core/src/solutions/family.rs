use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::catalog::{generators, optimal_element, ClassificationCase, Formula, ParamValues, Profile};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::lie::VectorField;
use crate::special::{rat, to_f64};
use crate::symbolic::{AlphaParameter, Monomial, MonomialSum};
use crate::verify::{PairEvaluator, PairJets};

/// The nonlinearity `b²(u)` on the right of the second equation.
#[derive(Clone)]
pub enum Coupling {
    /// `b²(u) = k² u^{2m}`.
    PowerLaw { k: BigRational, m: BigRational },
    /// `b²(u) = -u`, the transonic-flow sign convention.
    Transonic,
    Custom { name: String, b_squared: Profile },
}

impl Coupling {
    pub fn power_law(k: BigRational, m: BigRational) -> Self {
        Coupling::PowerLaw { k, m }
    }

    pub fn b_squared(&self, u: Jet) -> Jet {
        match self {
            Coupling::PowerLaw { k, m } => {
                let two_m = m * BigRational::from_integer(2.into());
                let (n, d) = (two_m.numer().to_i64().unwrap_or(0), two_m.denom().to_i64().unwrap_or(1));
                let k2 = to_f64(k).powi(2);
                if n == 0 {
                    return Jet::constant(k2);
                }
                u.pow_ratio(n, d).scale(k2)
            }
            Coupling::Transonic => -u,
            Coupling::Custom { b_squared, .. } => b_squared(u),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Coupling::PowerLaw { k, m } => format!("b²(u) = ({k})²·u^(2·{m})"),
            Coupling::Transonic => "b²(u) = -u".into(),
            Coupling::Custom { name, .. } => name.clone(),
        }
    }

    /// The classification case the coupling falls into at `alpha`.
    pub fn case(&self, alpha: &AlphaParameter) -> Result<ClassificationCase> {
        match self {
            Coupling::PowerLaw { k, m } if !m.is_zero() => {
                let two_alpha = alpha.value() * BigRational::from_integer(2.into());
                let degenerate = m * &(BigRational::one() - two_alpha) == *alpha.value();
                if degenerate {
                    ClassificationCase::degenerate(k.clone(), alpha)
                } else {
                    ClassificationCase::power_law(k.clone(), m.clone(), alpha)
                }
            }
            _ => Ok(ClassificationCase::generic()),
        }
    }
}

impl fmt::Debug for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// `coeff(x)·t^exponent`.
#[derive(Clone)]
pub struct TimeTerm {
    pub exponent: BigRational,
    pub coeff: Profile,
}

impl TimeTerm {
    pub fn new(exponent: BigRational, coeff: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Self {
        TimeTerm { exponent, coeff: Arc::new(coeff) }
    }
}

/// One of `u`, `v`: a finite sum of time powers with x-dependent
/// coefficients, plus an optional remainder without that structure.
#[derive(Clone)]
pub struct Component {
    pub terms: Vec<TimeTerm>,
    pub extra: Option<Formula>,
    /// Leading behaviour `t^hint` as `t → 0`.
    pub hint: f64,
}

impl Component {
    pub fn zero() -> Self {
        Component { terms: Vec::new(), extra: None, hint: 0.0 }
    }

    pub fn monomial(terms: Vec<TimeTerm>) -> Self {
        let hint = terms.iter().map(|t| to_f64(&t.exponent)).fold(f64::INFINITY, f64::min);
        Component { terms, extra: None, hint: if hint.is_finite() { hint } else { 0.0 } }
    }

    pub fn with_extra(mut self, extra: impl Fn(Jet, Jet) -> Jet + Send + Sync + 'static, hint: f64) -> Self {
        self.extra = Some(Arc::new(extra));
        self.hint = self.hint.min(hint);
        self
    }

    pub fn is_monomial(&self) -> bool {
        self.extra.is_none()
    }

    pub fn eval(&self, x: Jet, t: Jet) -> Jet {
        let mut acc = Jet::constant(0.0);
        for term in &self.terms {
            acc = acc + (term.coeff)(x) * t.powf(to_f64(&term.exponent));
        }
        if let Some(e) = &self.extra {
            acc = acc + e(x, t);
        }
        acc
    }

    pub fn negated(&self) -> Component {
        let terms = self
            .terms
            .iter()
            .map(|term| {
                let c = term.coeff.clone();
                TimeTerm { exponent: term.exponent.clone(), coeff: Arc::new(move |x| -c(x)) }
            })
            .collect();
        let extra = self.extra.clone().map(|e| Arc::new(move |x, t| -e(x, t)) as Formula);
        Component { terms, extra, hint: self.hint }
    }
}

/// An optimal-system element whose invariance condition the family obeys.
#[derive(Clone, Debug)]
pub struct GeneratorRef {
    pub case: ClassificationCase,
    pub index: usize,
    pub params: ParamValues,
    /// Fields are rewritten for `(u, v) → (-u, -v)`.
    pub reflected: bool,
}

impl GeneratorRef {
    pub fn new(case: ClassificationCase, index: usize, params: ParamValues) -> Self {
        GeneratorRef { case, index, params, reflected: false }
    }

    pub fn label(&self) -> String {
        format!("Case{}-U{}", self.case.label(), self.index)
    }

    pub fn field(&self, alpha: &AlphaParameter) -> Result<VectorField> {
        let el = optimal_element(&self.case, alpha, self.index)?;
        let alg = generators(&self.case, alpha)?.algebra()?;
        let f = alg.realize(&el.x_element(&self.params)?);
        if self.reflected {
            reflect_dependent(&f)
        } else {
            Ok(f)
        }
    }
}

fn reflect_sum(s: &MonomialSum, negate: bool) -> Result<MonomialSum> {
    let mut out = Vec::new();
    for (e, c) in s.terms() {
        let mut flips = 0i64;
        for ex in &e[2..] {
            if !ex.alpha_coeff.is_zero() || !ex.constant.is_integer() {
                return Err(Error::Unsupported("reflection of a non-integer power of u or v".into()));
            }
            flips += ex.constant.to_integer().to_i64().unwrap_or(0);
        }
        let odd = (flips.rem_euclid(2) == 1) != negate;
        let coeff = if odd { -c } else { c.clone() };
        out.push(Monomial::new(coeff, e.clone()));
    }
    Ok(MonomialSum::from_monomials(out))
}

/// The field in the coordinates `ū = -u`, `v̄ = -v`.
pub fn reflect_dependent(f: &VectorField) -> Result<VectorField> {
    Ok(VectorField::new(
        reflect_sum(&f.xi, false)?,
        reflect_sum(&f.tau, false)?,
        reflect_sum(&f.mu, true)?,
        reflect_sum(&f.phi, true)?,
    ))
}

pub type Domain = Arc<dyn Fn(f64, f64) -> bool + Send + Sync>;

/// A closed-form (or quadrature-backed) solution `(u, v)` of the system.
#[derive(Clone)]
pub struct SolutionFamily {
    pub id: String,
    pub alpha: AlphaParameter,
    pub params: BTreeMap<String, String>,
    pub coupling: Coupling,
    pub u: Component,
    pub v: Component,
    pub domain: Domain,
    pub domain_text: String,
    pub notes: Vec<String>,
    pub generators: Vec<GeneratorRef>,
}

impl fmt::Debug for SolutionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolutionFamily")
            .field("id", &self.id)
            .field("alpha", &self.alpha.to_string())
            .field("params", &self.params)
            .field("coupling", &self.coupling)
            .field("domain", &self.domain_text)
            .finish()
    }
}

impl SolutionFamily {
    pub fn contains(&self, x: f64, t: f64) -> bool {
        t > 0.0 && (self.domain)(x, t)
    }

    fn require(&self, x: f64, t: f64) -> Result<()> {
        if self.contains(x, t) {
            Ok(())
        } else {
            Err(Error::Domain(format!("family {} is not defined at x = {x}, t = {t} ({})", self.id, self.domain_text)))
        }
    }

    pub fn evaluate(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        self.require(x, t)?;
        let (xj, tj) = (Jet::constant(x), Jet::constant(t));
        let (u, v) = (self.u.eval(xj, tj).v, self.v.eval(xj, tj).v);
        if !(u.is_finite() && v.is_finite()) {
            return Err(Error::Domain(format!("family {} is not finite at x = {x}, t = {t}", self.id)));
        }
        Ok((u, v))
    }

    pub fn is_monomial(&self) -> bool {
        self.u.is_monomial() && self.v.is_monomial()
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.as_f64()
    }

    pub fn generator_fields(&self) -> Result<Vec<(String, VectorField)>> {
        self.generators.iter().map(|g| Ok((g.label(), g.field(&self.alpha)?))).collect()
    }
}

impl PairEvaluator for SolutionFamily {
    fn jets(&self, x: f64, t: f64) -> Result<PairJets> {
        self.require(x, t)?;
        let (xv, tc) = (Jet::variable(x), Jet::constant(t));
        let (xc, tv) = (Jet::constant(x), Jet::variable(t));
        let out = PairJets { ux: self.u.eval(xv, tc), vx: self.v.eval(xv, tc), ut: self.u.eval(xc, tv), vt: self.v.eval(xc, tv) };
        if ![out.ux, out.vx, out.ut, out.vt].iter().all(|j| j.is_finite()) {
            return Err(Error::Domain(format!("family {} is not finite at x = {x}, t = {t}", self.id)));
        }
        Ok(out)
    }
}

/// `u = v = 0`.
pub fn zero_family(coupling: Coupling, alpha: &AlphaParameter) -> SolutionFamily {
    SolutionFamily {
        id: "zero".into(),
        alpha: alpha.clone(),
        params: BTreeMap::new(),
        coupling,
        u: Component::zero(),
        v: Component::zero(),
        domain: Arc::new(|_, _| true),
        domain_text: "t > 0".into(),
        notes: Vec::new(),
        generators: Vec::new(),
    }
}

fn is_sqrt_coupling(c: &Coupling) -> bool {
    matches!(c, Coupling::PowerLaw { k, m } if k.abs().is_one() && *m == rat(1, 2))
}

/// `(ū, v̄) = (-u, -v)`: maps solutions with `b²(u) = u` to solutions of the
/// transonic system `D^α ū = v̄_x`, `D^α v̄ = -ū ū_x`, and back.
pub fn sign_flip(family: &SolutionFamily) -> Result<SolutionFamily> {
    let coupling = match &family.coupling {
        c if is_sqrt_coupling(c) => Coupling::Transonic,
        Coupling::Transonic => Coupling::power_law(BigRational::one(), rat(1, 2)),
        other => {
            return Err(Error::InvalidInput(format!(
                "sign flip needs b²(u) = u or b²(u) = -u, got {}",
                other.describe()
            )))
        }
    };
    let mut out = family.clone();
    out.coupling = coupling;
    out.u = family.u.negated();
    out.v = family.v.negated();
    out.id = match family.id.strip_prefix("flip(").and_then(|s| s.strip_suffix(')')) {
        Some(inner) => inner.to_string(),
        None => format!("flip({})", family.id),
    };
    out.generators = family
        .generators
        .iter()
        .map(|g| GeneratorRef { reflected: !g.reflected, ..g.clone() })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::int;
    use crate::symbolic::{ExponentExpr, ScalarExpr, Var};

    #[test]
    fn component_evaluation() {
        let c = Component::monomial(vec![
            TimeTerm::new(rat(1, 2), |x| x * x),
            TimeTerm::new(int(-1) / int(3), |_| Jet::constant(2.0)),
        ]);
        assert!((c.hint + 1.0 / 3.0).abs() < 1e-15);
        let v = c.eval(Jet::variable(3.0), Jet::constant(4.0));
        assert!((v.v - (9.0 * 2.0 + 2.0 * 4f64.powf(-1.0 / 3.0))).abs() < 1e-12);
        assert!((v.d1 - 12.0).abs() < 1e-12);
        assert!((c.negated().eval(Jet::constant(3.0), Jet::constant(4.0)).v + v.v).abs() < 1e-12);
    }

    #[test]
    fn power_coupling() {
        let c = Coupling::power_law(int(3), rat(1, 2));
        let b = c.b_squared(Jet::variable(2.0));
        assert!((b.v - 18.0).abs() < 1e-12 && (b.d1 - 9.0).abs() < 1e-12);
        let c = Coupling::power_law(int(1), rat(-1, 3));
        assert!((c.b_squared(Jet::constant(-8.0)).v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn reflection_of_fields() {
        // x∂x + u∂u is unchanged; ∂v flips sign
        let f = VectorField::new(
            MonomialSum::var(Var::X),
            MonomialSum::zero(),
            MonomialSum::var(Var::U),
            MonomialSum::one(),
        );
        let r = reflect_dependent(&f).unwrap();
        assert_eq!(r.mu, f.mu);
        assert_eq!(r.phi, MonomialSum::constant(ScalarExpr::int(-1)));
        let g = VectorField::new(
            MonomialSum::zero(),
            MonomialSum::zero(),
            MonomialSum::power(Var::U, ExponentExpr::constant(rat(1, 2))),
            MonomialSum::zero(),
        );
        assert!(reflect_dependent(&g).is_err());
    }

    #[test]
    fn zero_family_is_zero() {
        let a = AlphaParameter::from_ratio(1, 2).unwrap();
        let z = zero_family(Coupling::power_law(int(1), rat(1, 2)), &a);
        assert_eq!(z.evaluate(0.3, 1.0).unwrap(), (0.0, 0.0));
        let f = sign_flip(&z).unwrap();
        assert_eq!(f.evaluate(0.3, 1.0).unwrap(), (0.0, 0.0));
        assert_eq!(sign_flip(&f).unwrap().id, "zero");
        assert!(sign_flip(&zero_family(Coupling::power_law(int(2), rat(1, 2)), &a)).is_err());
    }
}
