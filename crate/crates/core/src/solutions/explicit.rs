use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

use super::family::{Component, Coupling, GeneratorRef, SolutionFamily, TimeTerm};
use crate::catalog::{params, u5_hypothesis, ClassificationCase};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::special::{gamma, gamma_rational, int, is_gamma_pole, real_pow, to_f64};
use crate::symbolic::{rl_derivative_t, AlphaParameter, ExponentExpr, MonomialSum, Var};

/// `Γ(p+1)/Γ(p+1-α)` for `D^α t^p = factor·t^{p-α}`, zero on the kernel.
pub fn power_rule_factor(p: &BigRational, alpha: &AlphaParameter) -> Result<f64> {
    let f = MonomialSum::power(Var::T, ExponentExpr::constant(p.clone()));
    rl_derivative_t(&f, alpha)?.evaluate(alpha.value(), [0.0, 1.0, 0.0, 0.0])
}

fn echo(pairs: &[(&str, &BigRational)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn require_sign(name: &str, v: &BigRational, allow_zero: bool) -> Result<()> {
    if v.abs().is_one() || (allow_zero && v.is_zero()) {
        Ok(())
    } else {
        let allowed = if allow_zero { "0, 1 or -1" } else { "1 or -1" };
        Err(Error::InvalidInput(format!("{name} must be {allowed}, got {v}")))
    }
}

fn always() -> Arc<dyn Fn(f64, f64) -> bool + Send + Sync> {
    Arc::new(|_, _| true)
}

/// Translation-invariant solution
/// `u = C t^{2α-1} + c1 t^{α-1}`, `v = (c2 + a x) t^{α-1}`.
///
/// `C` is the coefficient for which `D^α(C t^{2α-1}) = a t^{α-1}`, taken from
/// the power rule. The solution holds for every coupling since `u_x = 0`.
pub fn family_5_1(
    a: &BigRational,
    c1: &BigRational,
    c2: &BigRational,
    alpha: &AlphaParameter,
    coupling: Coupling,
) -> Result<SolutionFamily> {
    alpha.require_unit_interval()?;
    require_sign("a", a, true)?;
    let al = alpha.value();
    let lead_exp = int(2) * al - int(1);
    let factor = power_rule_factor(&lead_exp, alpha)?;
    let af = to_f64(a);
    let big_c = af / factor;
    let alternative = af / gamma(alpha.as_f64());
    let (c1f, c2f) = (to_f64(c1), to_f64(c2));
    let kernel = al - int(1);
    let mut notes = vec![format!("leading coefficient C = a·Γ(α)/Γ(2α) = {big_c:.12}, from D^α t^(2α-1) = Γ(2α)/Γ(α)·t^(α-1)")];
    if !a.is_zero() && (alternative - big_c).abs() > 1e-12 {
        notes.push(format!(
            "the alternative coefficient a/Γ(α) = {alternative:.12} does not satisfy D^α φ = a·t^(α-1) (residual factor {:.6})",
            alternative * factor - af
        ));
    }
    Ok(SolutionFamily {
        id: "5.1".into(),
        alpha: alpha.clone(),
        params: echo(&[("a", a), ("c1", c1), ("c2", c2)]),
        coupling,
        u: Component::monomial(vec![
            TimeTerm::new(lead_exp, move |_| Jet::constant(big_c)),
            TimeTerm::new(kernel.clone(), move |_| Jet::constant(c1f)),
        ]),
        v: Component::monomial(vec![TimeTerm::new(kernel, move |x| x * af + c2f)]),
        domain: always(),
        domain_text: "t > 0".into(),
        notes,
        generators: vec![GeneratorRef::new(ClassificationCase::generic(), 1, params(&[("a", a.clone())]))],
    })
}

/// Coefficients of the separable power solution
/// `u = A (x-c2)^{1/m} t^{-α/m}`, `v = B (x-c2)^{(m+1)/m} t^{-(m+1)α/m}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerCoefficients {
    pub a: f64,
    pub b: f64,
}

/// `A` from its closed form after scanning every gamma argument for poles;
/// `B = A·m/(m+1)·Γ(1-α/m)/Γ(1-(m+1)α/m)` from the first equation.
pub fn power_coefficients(m: &BigRational, k: &BigRational, alpha: &AlphaParameter) -> Result<PowerCoefficients> {
    alpha.require_unit_interval()?;
    let al = alpha.value();
    let one = BigRational::one();
    if k.is_zero() {
        return Err(Error::InvalidInput("k must be nonzero".into()));
    }
    if !u5_hypothesis(m, al) {
        return Err(Error::HypothesisViolated(format!("m < 0 or m > α/(1-α) (m = {m}, α = {al})")));
    }
    let two_m1 = int(2) * m + &one;
    let args = [-(al / m), -(&two_m1 * al / m), -((m + &one) * al / m)];
    if let Some(pole) = args.iter().find(|r| is_gamma_pole(r)) {
        return Err(Error::SingularParameter(pole.to_string()));
    }
    let (mf, kf) = (to_f64(m), to_f64(k));
    let radicand = mf * mf / (kf * kf * (mf + 1.0) * to_f64(&two_m1)) * gamma_rational(&args[0])? / gamma_rational(&args[1])?;
    let a = real_pow(radicand, &(&one / (int(2) * m))).map_err(|e| match e {
        Error::NonrealRoot(_) => Error::NonrealRoot(format!(
            "A^(2m) = {radicand:.6e} < 0 for m = {m}, k = {k}, α = {al}"
        )),
        other => other,
    })?;
    let g1 = gamma_rational(&(&one + &args[0]))? / gamma_rational(&(&one + &args[2]))?;
    Ok(PowerCoefficients { a, b: a * g1 * mf / (mf + 1.0) })
}

fn power_family(
    id: &str,
    m: &BigRational,
    k: &BigRational,
    alpha: &AlphaParameter,
    c2: &BigRational,
) -> Result<SolutionFamily> {
    let PowerCoefficients { a, b } = power_coefficients(m, k, alpha)?;
    let al = alpha.value();
    let one = BigRational::one();
    let (mf, c2f) = (to_f64(m), to_f64(c2));
    let (ex_u, ex_v) = (1.0 / mf, (mf + 1.0) / mf);
    let case = Coupling::power_law(k.clone(), m.clone()).case(alpha)?;
    let degenerate = matches!(case, ClassificationCase::PowerLaw { subcase: crate::catalog::Subcase::Degenerate, .. });
    let zero = params(&[("a", int(0))]);
    let mut generators = Vec::new();
    if degenerate {
        if c2.is_zero() {
            generators.push(GeneratorRef::new(case.clone(), 3, zero.clone()));
        }
        generators.push(GeneratorRef::new(case.clone(), 4, zero));
    } else {
        if c2.is_zero() {
            generators.push(GeneratorRef::new(case.clone(), 4, zero));
        }
        generators.push(GeneratorRef::new(case.clone(), 5, params(&[])));
    }
    Ok(SolutionFamily {
        id: id.into(),
        alpha: alpha.clone(),
        params: echo(&[("m", m), ("k", k), ("c2", c2)]),
        coupling: Coupling::power_law(k.clone(), m.clone()),
        u: Component::monomial(vec![TimeTerm::new(-(al / m), move |x| (x - c2f).powf(ex_u).scale(a))]),
        v: Component::monomial(vec![TimeTerm::new(-((m + &one) * al / m), move |x| (x - c2f).powf(ex_v).scale(b))]),
        domain: Arc::new(move |x, _| x > c2f),
        domain_text: format!("x > {c2}"),
        notes: vec![format!("A = {a:.12}, B = {b:.12}")],
        generators,
    })
}

/// `u = A x^{1/m} t^{-α/m}`, `v = B x^{(m+1)/m} t^{-(m+1)α/m}`.
pub fn family_19(m: &BigRational, k: &BigRational, alpha: &AlphaParameter) -> Result<SolutionFamily> {
    power_family("19", m, k, alpha, &int(0))
}

/// The same profile shifted to `x - c2`.
pub fn family_21(m: &BigRational, k: &BigRational, alpha: &AlphaParameter, c2: &BigRational) -> Result<SolutionFamily> {
    power_family("21", m, k, alpha, c2)
}

/// `m = -1/2`: `u = c1Γ(1+α)²/(2k²Γ(1+2α))·t^{2α}(tan²ω + 1)`,
/// `v = √c1·t^α tan ω`, `ω = √c1 Γ(1+α)(x-c2)/(2k²)`.
pub fn family_22(k: &BigRational, alpha: &AlphaParameter, c1: &BigRational, c2: &BigRational) -> Result<SolutionFamily> {
    alpha.require_unit_interval()?;
    if !c1.is_positive() {
        return Err(Error::HypothesisViolated(format!("c1 > 0 (c1 = {c1})")));
    }
    if k.is_zero() {
        return Err(Error::InvalidInput("k must be nonzero".into()));
    }
    let al = alpha.value();
    let one = BigRational::one();
    let (kf, c1f, c2f) = (to_f64(k), to_f64(c1), to_f64(c2));
    let g1 = gamma_rational(&(&one + al))?;
    let g2 = gamma_rational(&(&one + int(2) * al))?;
    let omega = c1f.sqrt() * g1 / (2.0 * kf * kf);
    let amp = c1f * g1 * g1 / (2.0 * kf * kf * g2);
    let sq = c1f.sqrt();
    let m = BigRational::new((-1).into(), 2.into());
    let case = ClassificationCase::power_law(k.clone(), m.clone(), alpha)?;
    Ok(SolutionFamily {
        id: "22".into(),
        alpha: alpha.clone(),
        params: echo(&[("k", k), ("c1", c1), ("c2", c2)]),
        coupling: Coupling::power_law(k.clone(), m),
        u: Component::monomial(vec![TimeTerm::new(int(2) * al, move |x| {
            let tn = ((x - c2f) * omega).tan();
            (tn * tn + 1.0).scale(amp)
        })]),
        v: Component::monomial(vec![TimeTerm::new(al.clone(), move |x| ((x - c2f) * omega).tan().scale(sq))]),
        domain: Arc::new(move |x, _| ((x - c2f) * omega).cos().abs() > 1e-6),
        domain_text: format!("cos({omega:.6}·(x - {c2})) ≠ 0"),
        notes: vec![format!("ω = {omega:.12}, amplitude {amp:.12}")],
        generators: vec![GeneratorRef::new(case, 5, params(&[]))],
    })
}

fn degenerate_case(k: &BigRational, alpha: &AlphaParameter) -> Result<ClassificationCase> {
    ClassificationCase::degenerate(k.clone(), alpha)
}

/// `u = a1Γ(α)/Γ(2α)·t^{2α-1}`, `v = (a2 c + a1 x)t^{α-1}` with
/// `m = α/(1-2α)`.
pub fn family_5_4(
    a1: &BigRational,
    a2: &BigRational,
    c: &BigRational,
    k: &BigRational,
    alpha: &AlphaParameter,
) -> Result<SolutionFamily> {
    require_sign("a2", a2, false)?;
    let case = degenerate_case(k, alpha)?;
    let al = alpha.value();
    let lead_exp = int(2) * al - int(1);
    let lead = to_f64(a1) / power_rule_factor(&lead_exp, alpha)?;
    let (a1f, shift) = (to_f64(a1), to_f64(&(a2 * c)));
    let m = case.m().cloned().unwrap_or_else(|| int(0));
    Ok(SolutionFamily {
        id: "5.4".into(),
        alpha: alpha.clone(),
        params: echo(&[("a1", a1), ("a2", a2), ("c", c), ("k", k)]),
        coupling: Coupling::power_law(k.clone(), m),
        u: Component::monomial(vec![TimeTerm::new(lead_exp, move |_| Jet::constant(lead))]),
        v: Component::monomial(vec![TimeTerm::new(al - int(1), move |x| x * a1f + shift)]),
        domain: always(),
        domain_text: "t > 0".into(),
        notes: vec![format!("leading coefficient a1·Γ(α)/Γ(2α) = {lead:.12}")],
        generators: vec![GeneratorRef::new(case, 2, params(&[("a1", a1.clone()), ("a2", a2.clone())]))],
    })
}

/// `u = W^{1-2α} t^{2α-1}`,
/// `v = (K W^{2(1-α)} - αa ln t + c2) t^{α-1}` with
/// `W = c1 - aΓ(α+1)x/(k²(1-2α))`, `m = α/(1-2α)`.
pub fn family_5_5(
    a: &BigRational,
    c1: &BigRational,
    c2: &BigRational,
    k: &BigRational,
    alpha: &AlphaParameter,
) -> Result<SolutionFamily> {
    require_sign("a", a, false)?;
    let case = degenerate_case(k, alpha)?;
    let al = alpha.value();
    let one = BigRational::one();
    let alf = alpha.as_f64();
    let (af, kf, c1f, c2f) = (to_f64(a), to_f64(k), to_f64(c1), to_f64(c2));
    let g_a = gamma_rational(al)?;
    let g_a1 = gamma_rational(&(al + &one))?;
    let g_2a = gamma_rational(&(int(2) * al))?;
    let slope = -af * g_a1 / (kf * kf * (1.0 - 2.0 * alf));
    let kk = kf * kf * (2.0 * alf - 1.0) / (2.0 * af * (1.0 - alf)) * g_2a / (g_a * g_a1);
    let m = case.m().cloned().unwrap_or_else(|| int(0));
    let w = move |x: Jet| x * slope + c1f;
    let log_coeff = -alf * af;
    Ok(SolutionFamily {
        id: "5.5".into(),
        alpha: alpha.clone(),
        params: echo(&[("a", a), ("c1", c1), ("c2", c2), ("k", k)]),
        coupling: Coupling::power_law(k.clone(), m),
        u: Component::monomial(vec![TimeTerm::new(int(2) * al - &one, move |x| w(x).powf(1.0 - 2.0 * alf))]),
        v: Component::monomial(vec![TimeTerm::new(al - &one, move |x| w(x).powf(2.0 * (1.0 - alf)).scale(kk) + c2f)])
            .with_extra(move |_, t| t.ln() * t.powf(alf - 1.0) * log_coeff, alf - 1.0),
        domain: Arc::new(move |x, _| slope * x + c1f > 0.0),
        domain_text: format!("{c1f} + ({slope:.6})·x > 0"),
        notes: vec![format!("W(x) = {c1f} + ({slope:.12})·x, K = {kk:.12}")],
        generators: vec![GeneratorRef::new(case, 4, params(&[("a", a.clone())]))],
    })
}
