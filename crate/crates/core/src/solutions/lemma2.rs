use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::catalog::u5_hypothesis;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::special::{gamma_rational, int, real_pow, to_f64};
use crate::symbolic::{rl_derivative_t, AlphaParameter, ExponentExpr, MonomialSum, Var};

/// Power solution `φ = c1 z^{λ1}`, `ψ = c2 z^{λ2}` of
/// `D^α φ = a1 ψ + a2 z ψ'`, `D^α ψ = φ^{2m}(b1 φ + b2 z φ')`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma2Solution {
    pub m: String,
    pub alpha: String,
    #[serde(skip)]
    pub lambda1: ExponentExpr,
    #[serde(skip)]
    pub lambda2: ExponentExpr,
    pub lambda1_value: f64,
    pub lambda2_value: f64,
    pub c1: f64,
    pub c2: f64,
    #[serde(skip)]
    coefficients: [f64; 4],
    #[serde(skip)]
    exact: (BigRational, AlphaParameter),
}

fn hypothesis(what: &str) -> Error {
    Error::HypothesisViolated(what.to_string())
}

pub fn lemma2_solve(
    m: &BigRational,
    alpha: &AlphaParameter,
    a1: &BigRational,
    a2: &BigRational,
    b1: &BigRational,
    b2: &BigRational,
) -> Result<Lemma2Solution> {
    alpha.require_unit_interval()?;
    let al = alpha.value();
    let one = BigRational::one();
    if !u5_hypothesis(m, al) {
        return Err(hypothesis("m < 0 or m > α/(1-α)"));
    }
    let denom = &one - int(2) * al;
    if !denom.is_zero() && *m == al / &denom {
        return Err(hypothesis("m ≠ α/(1-2α)"));
    }
    let p = m * a1 - (m + &one) * a2 * al;
    if p.is_zero() {
        return Err(hypothesis("m·a1 - (m+1)·a2·α ≠ 0"));
    }
    let q = m * b1 - b2 * al;
    if q.is_zero() {
        return Err(hypothesis("m·b1 - b2·α ≠ 0"));
    }
    let lambda1 = ExponentExpr::new(BigRational::zero(), -(&one / m));
    let lambda2 = ExponentExpr::new(BigRational::zero(), -((m + &one) / m));
    let (l1, l2) = (lambda1.eval(al), lambda2.eval(al));
    let g1 = gamma_rational(&(&one + &l1))?;
    let g2 = gamma_rational(&(&one + &l2))?;
    let g3 = gamma_rational(&(&one + &l2 - al))?;
    let mf = to_f64(m);
    let (pf, qf) = (to_f64(&p), to_f64(&q));
    let radicand = g1 * mf * mf / (g3 * pf * qf);
    let c1 = real_pow(radicand, &(&one / (int(2) * m))).map_err(|e| match e {
        Error::NonrealRoot(_) => Error::NonrealRoot(format!("c1^(2m) = {radicand} < 0 with m = {m}")),
        other => other,
    })?;
    let c2 = c1 * g1 * mf / (g2 * pf);
    Ok(Lemma2Solution {
        m: m.to_string(),
        alpha: alpha.to_string(),
        lambda1_value: to_f64(&l1),
        lambda2_value: to_f64(&l2),
        lambda1,
        lambda2,
        c1,
        c2,
        coefficients: [to_f64(a1), to_f64(a2), to_f64(b1), to_f64(b2)],
        exact: (m.clone(), alpha.clone()),
    })
}

impl Lemma2Solution {
    pub fn phi(&self, z: Jet) -> Jet {
        z.powf(self.lambda1_value).scale(self.c1)
    }

    pub fn psi(&self, z: Jet) -> Jet {
        z.powf(self.lambda2_value).scale(self.c2)
    }

    /// Both equations at `z > 0`, with the fractional derivatives taken by
    /// the exact power rule.
    pub fn residual(&self, z: f64) -> Result<[f64; 2]> {
        let (m, alpha) = &self.exact;
        let at = [0.0, z, 0.0, 0.0];
        let d1 = rl_derivative_t(&MonomialSum::power(Var::T, self.lambda1.clone()), alpha)?.evaluate(alpha.value(), at)?;
        let d2 = rl_derivative_t(&MonomialSum::power(Var::T, self.lambda2.clone()), alpha)?.evaluate(alpha.value(), at)?;
        let [a1, a2, b1, b2] = self.coefficients;
        let phi = self.phi(Jet::variable(z));
        let psi = self.psi(Jet::variable(z));
        let two_m = int(2) * m;
        let r1 = self.c1 * d1 - (a1 * psi.v + a2 * z * psi.d1);
        let r2 = self.c2 * d2 - real_pow(phi.v, &two_m)? * (b1 * phi.v + b2 * z * phi.d1);
        Ok([r1, r2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{gamma, rat};

    fn alpha(n: i64, d: i64) -> AlphaParameter {
        AlphaParameter::from_ratio(n, d).unwrap()
    }

    #[test]
    fn exponents_follow_m() {
        let s = lemma2_solve(&int(1), &alpha(1, 4), &int(2), &int(-1), &int(1), &int(1)).unwrap();
        assert!((s.lambda1_value + 0.25).abs() < 1e-15);
        assert!((s.lambda2_value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn residual_vanishes() {
        let cases = [
            (int(3), alpha(1, 3), [int(2), int(-1), int(1), int(1)]),
            (int(2), alpha(1, 3), [int(3), int(-1), int(1), int(0)]),
            (rat(-1, 3), alpha(2, 5), [int(1), int(1), int(-2), int(1)]),
            (rat(1, 2), alpha(1, 5), [rat(3, 2), int(-5), rat(1, 2), int(5)]),
        ];
        let mut solved = 0;
        for (m, a, [a1, a2, b1, b2]) in cases {
            let s = match lemma2_solve(&m, &a, &a1, &a2, &b1, &b2) {
                Ok(s) => s,
                Err(Error::NonrealRoot(_)) => continue,
                Err(e) => panic!("m = {m}: {e}"),
            };
            for z in [0.3, 1.0, 2.7] {
                let [r1, r2] = s.residual(z).unwrap();
                assert!(r1.abs() < 1e-10 && r2.abs() < 1e-10, "m = {m}, z = {z}: {r1}, {r2}");
            }
            solved += 1;
        }
        assert!(solved >= 3);
    }

    #[test]
    fn coefficients_match_closed_form() {
        // c2 magnitude from the stand-alone expression without c1
        let (m, a) = (int(2), alpha(1, 3));
        let (a1, a2, b1, b2) = (int(3), int(-1), int(1), int(0));
        let s = lemma2_solve(&m, &a, &a1, &a2, &b1, &b2).unwrap();
        let (mf, al) = (2.0, 1.0 / 3.0);
        let p = mf * 3.0 + (mf + 1.0) * al;
        let q = mf;
        let inner = gamma(1.0 - al / mf).powf(2.0 * mf + 1.0) * mf.powf(2.0 * mf + 2.0)
            / (gamma(1.0 - (2.0 * mf + 1.0) * al / mf) * p.powf(2.0 * mf + 1.0) * q);
        let c2 = inner.powf(1.0 / (2.0 * mf)) / gamma(1.0 - (mf + 1.0) * al / mf);
        assert!((s.c2.abs() - c2).abs() < 1e-12 * c2, "{} vs {c2}", s.c2);
    }

    #[test]
    fn hypothesis_failures_are_named() {
        let a = alpha(1, 3);
        let e = lemma2_solve(&rat(1, 4), &a, &int(1), &int(1), &int(1), &int(1)).unwrap_err();
        assert!(matches!(e, Error::HypothesisViolated(ref s) if s.contains("α/(1-α)")));
        // α/(1-2α) = 1
        let e = lemma2_solve(&int(1), &a, &int(1), &int(1), &int(1), &int(1)).unwrap_err();
        assert!(matches!(e, Error::HypothesisViolated(ref s) if s.contains("1-2α")));
        let e = lemma2_solve(&int(2), &a, &rat(1, 2), &int(1), &int(1), &int(1)).unwrap_err();
        assert!(matches!(e, Error::HypothesisViolated(ref s) if s.contains("a2")));
        let e = lemma2_solve(&int(2), &a, &int(1), &int(1), &int(1), &int(6)).unwrap_err();
        assert!(matches!(e, Error::HypothesisViolated(ref s) if s.contains("b2")));
        // α = 1/2 excludes no m
        assert!(lemma2_solve(&int(2), &alpha(1, 2), &int(-1), &int(0), &int(1), &int(0)).is_ok());
    }

    #[test]
    fn negative_even_root() {
        // radicand sign follows P·Q; flip P to make it negative with 2m = 4
        let e = lemma2_solve(&int(2), &alpha(1, 3), &int(-3), &int(0), &int(1), &int(0)).unwrap_err();
        assert!(matches!(e, Error::NonrealRoot(_)));
    }
}
