use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

use super::alpha::AlphaParameter;
use super::exponent::ExponentExpr;
use super::monomial::{pow_checked, Exponents, MonomialSum, Var};
use super::scalar::ScalarExpr;
use crate::error::{Error, Result};
use crate::special::{gamma_rational, is_gamma_pole};

/// Ratio `Π Γ(num_i) / Π Γ(den_j)` with arguments affine in alpha.
///
/// Arguments are kept sorted and common factors cancelled, so two equal
/// ratios compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GammaRatio {
    pub num: Vec<ExponentExpr>,
    pub den: Vec<ExponentExpr>,
}

impl GammaRatio {
    pub fn one() -> Self {
        GammaRatio::default()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_empty() && self.den.is_empty()
    }

    fn canonical(mut num: Vec<ExponentExpr>, mut den: Vec<ExponentExpr>) -> Self {
        num.sort();
        den.sort();
        let (mut i, mut j) = (0, 0);
        let (mut n_out, mut d_out) = (Vec::new(), Vec::new());
        while i < num.len() && j < den.len() {
            match num[i].cmp(&den[j]) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => {
                    n_out.push(num[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    d_out.push(den[j].clone());
                    j += 1;
                }
            }
        }
        n_out.extend_from_slice(&num[i..]);
        d_out.extend_from_slice(&den[j..]);
        GammaRatio { num: n_out, den: d_out }
    }

    pub fn mul(&self, other: &GammaRatio) -> GammaRatio {
        let num = self.num.iter().chain(&other.num).cloned().collect();
        let den = self.den.iter().chain(&other.den).cloned().collect();
        GammaRatio::canonical(num, den)
    }

    /// Numeric value at an exact alpha. Poles in the numerator are errors;
    /// a pole in the denominator makes the ratio zero.
    pub fn eval(&self, alpha: &BigRational) -> Result<f64> {
        for d in &self.den {
            if is_gamma_pole(&d.eval(alpha)) {
                return Ok(0.0);
            }
        }
        let mut v = 1.0;
        for n in &self.num {
            v *= gamma_rational(&n.eval(alpha))?;
        }
        for d in &self.den {
            v /= gamma_rational(&d.eval(alpha))?;
        }
        Ok(v)
    }
}

impl fmt::Display for GammaRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |v: &[ExponentExpr]| {
            v.iter().map(|a| format!("Γ({a})")).collect::<Vec<_>>().join("·")
        };
        match (self.num.is_empty(), self.den.is_empty()) {
            (true, true) => write!(f, "1"),
            (false, true) => write!(f, "{}", side(&self.num)),
            (true, false) => write!(f, "1/({})", side(&self.den)),
            (false, false) => write!(f, "{}/({})", side(&self.num), side(&self.den)),
        }
    }
}

/// Sum of `c(alpha) · Γ-ratio · x^e1 t^e2 u^e3 v^e4`: the image of a
/// MonomialSum under the fractional power rule.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GammaSum {
    terms: BTreeMap<(Exponents, GammaRatio), ScalarExpr>,
}

impl GammaSum {
    pub fn zero() -> Self {
        GammaSum::default()
    }

    /// Lift a MonomialSum (all gamma ratios trivial).
    pub fn from_monomials(f: &MonomialSum) -> Self {
        let mut s = GammaSum::zero();
        for (e, c) in f.terms() {
            s.push(c.clone(), e.clone(), GammaRatio::one());
        }
        s
    }

    fn push(&mut self, coeff: ScalarExpr, exponents: Exponents, ratio: GammaRatio) {
        if coeff.is_zero() {
            return;
        }
        let key = (exponents, ratio);
        match self.terms.remove(&key) {
            Some(old) => {
                let merged = &old + &coeff;
                if !merged.is_zero() {
                    self.terms.insert(key, merged);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &GammaRatio, &ScalarExpr)> {
        self.terms.iter().map(|((e, g), c)| (e, g, c))
    }

    pub fn add(&self, other: &GammaSum) -> GammaSum {
        let mut out = self.clone();
        for ((e, g), c) in &other.terms {
            out.push(c.clone(), e.clone(), g.clone());
        }
        out
    }

    pub fn scale(&self, c: &ScalarExpr) -> GammaSum {
        let mut out = GammaSum::zero();
        for ((e, g), k) in &self.terms {
            out.push(k * c, e.clone(), g.clone());
        }
        out
    }

    pub fn sub(&self, other: &GammaSum) -> GammaSum {
        self.add(&other.scale(&ScalarExpr::int(-1)))
    }

    /// Apply the power rule once more in t.
    pub fn rl_derivative_t(&self, alpha: &AlphaParameter) -> Result<GammaSum> {
        let mut out = GammaSum::zero();
        for ((e, g), c) in &self.terms {
            if let Some((e2, g2)) = power_rule_term(e, alpha)? {
                out.push(c.clone(), e2, g.mul(&g2));
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, alpha: &BigRational, point: [f64; 4]) -> Result<f64> {
        let mut acc = 0.0;
        for ((e, g), c) in &self.terms {
            let mut term = c.eval_f64(alpha)? * g.eval(alpha)?;
            for var in Var::ALL {
                term *= pow_checked(point[var as usize], &e[var as usize].eval(alpha), var)?;
            }
            acc += term;
        }
        Ok(acc)
    }
}

/// Image of one monomial's exponent vector under D^alpha_t, or None when
/// the denominator gamma sits on a pole.
fn power_rule_term(e: &Exponents, alpha: &AlphaParameter) -> Result<Option<(Exponents, GammaRatio)>> {
    if !e[Var::U as usize].is_zero() || !e[Var::V as usize].is_zero() {
        return Err(Error::UnsupportedOperand(
            "time-fractional derivative of an expression containing u or v".into(),
        ));
    }
    let a = alpha.value();
    let p = &e[Var::T as usize];
    if !p.exceeds_minus_one(a) {
        return Err(Error::UndefinedDerivative { exponent: p.eval(a).to_string() });
    }
    let one = ExponentExpr::int(1);
    let alpha_e = ExponentExpr::new(BigRational::zero(), BigRational::one());
    let top = p + &one;
    let bottom = &top - &alpha_e;
    let b = bottom.eval(a);
    if !b.is_positive() && b.is_integer() {
        return Ok(None);
    }
    let mut e2 = e.clone();
    e2[Var::T as usize] = p - &alpha_e;
    Ok(Some((e2, GammaRatio::canonical(vec![top], vec![bottom]))))
}

/// Riemann-Liouville derivative in t of a sum of x,t monomials.
pub fn rl_derivative_t(f: &MonomialSum, alpha: &AlphaParameter) -> Result<GammaSum> {
    GammaSum::from_monomials(f).rl_derivative_t(alpha)
}

impl fmt::Display for GammaSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, ((e, g), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mono = MonomialSum::term(c.clone(), e.clone());
            if g.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "[{g}]·{mono}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{gamma, rat};

    fn alpha(n: i64, d: i64) -> AlphaParameter {
        AlphaParameter::from_ratio(n, d).unwrap()
    }

    fn t_pow(c: BigRational, b: BigRational) -> MonomialSum {
        MonomialSum::power(Var::T, ExponentExpr::new(c, b))
    }

    #[test]
    fn kernel_is_annihilated() {
        for (n, d) in [(1, 2), (1, 3), (3, 4), (3, 2)] {
            let k = MonomialSum::power(Var::T, ExponentExpr::alpha_plus(-1));
            assert!(rl_derivative_t(&k, &alpha(n, d)).unwrap().is_zero());
        }
    }

    #[test]
    fn constant_at_half() {
        let r = rl_derivative_t(&MonomialSum::one(), &alpha(1, 2)).unwrap();
        let v = r.evaluate(&rat(1, 2), [0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((v - 0.564_189_583_547_756_3).abs() < 1e-13);
        let v4 = r.evaluate(&rat(1, 2), [0.0, 4.0, 0.0, 0.0]).unwrap();
        assert!((v4 - 0.5 * 0.564_189_583_547_756_3).abs() < 1e-13);
    }

    #[test]
    fn sqrt_t_at_half() {
        let f = t_pow(rat(1, 2), rat(0, 1));
        let r = rl_derivative_t(&f, &alpha(1, 2)).unwrap();
        let v = r.evaluate(&rat(1, 2), [0.0, 2.5, 0.0, 0.0]).unwrap();
        assert!((v - 0.886_226_925_452_758).abs() < 1e-13);
    }

    #[test]
    fn errors() {
        let f = t_pow(rat(-1, 1), rat(0, 1));
        assert!(matches!(rl_derivative_t(&f, &alpha(1, 2)), Err(Error::UndefinedDerivative { .. })));
        let g = MonomialSum::var(Var::U);
        assert!(matches!(rl_derivative_t(&g, &alpha(1, 2)), Err(Error::UnsupportedOperand(_))));
    }

    #[test]
    fn twofold_rule_composes_gammas() {
        // D^a D^a t^{2a} = Γ(2a+1)/Γ(1) · t^0 at a = 1/3
        let f = t_pow(rat(0, 1), rat(2, 1));
        let a = alpha(1, 3);
        let d2 = rl_derivative_t(&f, &a).unwrap().rl_derivative_t(&a).unwrap();
        let v = d2.evaluate(&rat(1, 3), [0.0, 1.7, 0.0, 0.0]).unwrap();
        assert!((v - gamma(5.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn x_factor_is_a_parameter() {
        let f = MonomialSum::var(Var::X).mul(&t_pow(rat(1, 1), rat(0, 1)));
        let r = rl_derivative_t(&f, &alpha(1, 2)).unwrap();
        let v = r.evaluate(&rat(1, 2), [3.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((v - 3.0 / gamma(1.5)).abs() < 1e-13);
    }
}
