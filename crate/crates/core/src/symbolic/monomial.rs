use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use std::collections::BTreeMap;
use std::fmt;

use super::exponent::ExponentExpr;
use super::scalar::ScalarExpr;
use crate::error::{Error, Result};
use crate::special::to_f64;

/// The four variables of the system, in their fixed order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X = 0,
    T = 1,
    U = 2,
    V = 3,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::X, Var::T, Var::U, Var::V];

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::T => "t",
            Var::U => "u",
            Var::V => "v",
        }
    }
}

pub type Exponents = [ExponentExpr; 4];

fn zero_exponents() -> Exponents {
    Default::default()
}

/// A single term `coeff * x^e1 * t^e2 * u^e3 * v^e4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: ScalarExpr,
    pub exponents: Exponents,
}

impl Monomial {
    pub fn new(coeff: ScalarExpr, exponents: Exponents) -> Self {
        if coeff.is_zero() {
            return Monomial { coeff, exponents: zero_exponents() };
        }
        Monomial { coeff, exponents }
    }
}

/// Finite sum of monomials with merged exponent vectors and no zero terms.
///
/// Terms are kept in lexicographic order of their exponent vectors, which
/// makes derived equality structural.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct MonomialSum {
    terms: BTreeMap<Exponents, ScalarExpr>,
}

impl MonomialSum {
    pub fn zero() -> Self {
        MonomialSum::default()
    }

    pub fn constant(c: ScalarExpr) -> Self {
        MonomialSum::term(c, zero_exponents())
    }

    pub fn one() -> Self {
        MonomialSum::constant(ScalarExpr::one())
    }

    pub fn term(coeff: ScalarExpr, exponents: Exponents) -> Self {
        let mut s = MonomialSum::zero();
        s.push(coeff, exponents);
        s
    }

    /// `var^exponent` with unit coefficient.
    pub fn power(var: Var, exponent: ExponentExpr) -> Self {
        let mut e = zero_exponents();
        e[var as usize] = exponent;
        MonomialSum::term(ScalarExpr::one(), e)
    }

    pub fn var(var: Var) -> Self {
        MonomialSum::power(var, ExponentExpr::int(1))
    }

    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(it: I) -> Self {
        let mut s = MonomialSum::zero();
        for m in it {
            s.push(m.coeff, m.exponents);
        }
        s
    }

    fn push(&mut self, coeff: ScalarExpr, exponents: Exponents) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&exponents) {
            Some(existing) => {
                let merged = &existing + &coeff;
                if !merged.is_zero() {
                    self.terms.insert(exponents, merged);
                }
            }
            None => {
                self.terms.insert(exponents, coeff);
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

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms
            .iter()
            .map(|(e, c)| Monomial { coeff: c.clone(), exponents: e.clone() })
            .collect()
    }

    pub fn coefficient(&self, exponents: &Exponents) -> ScalarExpr {
        self.terms.get(exponents).cloned().unwrap_or_else(ScalarExpr::zero)
    }

    /// True if some term carries a nonzero exponent in `var`.
    pub fn depends_on(&self, var: Var) -> bool {
        self.terms.keys().any(|e| !e[var as usize].is_zero())
    }

    pub fn add(&self, other: &MonomialSum) -> MonomialSum {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.push(c.clone(), e.clone());
        }
        out
    }

    pub fn neg(&self) -> MonomialSum {
        MonomialSum { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &MonomialSum) -> MonomialSum {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ScalarExpr) -> MonomialSum {
        if c.is_zero() {
            return MonomialSum::zero();
        }
        MonomialSum { terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect() }
    }

    pub fn mul(&self, other: &MonomialSum) -> MonomialSum {
        let mut out = MonomialSum::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = std::array::from_fn(|i| &e1[i] + &e2[i]);
                out.push(c1 * c2, e);
            }
        }
        out
    }

    /// Classical partial derivative with respect to `var`.
    pub fn differentiate(&self, var: Var) -> MonomialSum {
        let i = var as usize;
        let mut out = MonomialSum::zero();
        for (e, c) in &self.terms {
            if e[i].is_zero() {
                continue;
            }
            let coeff = c * &e[i].to_scalar();
            let mut e2 = e.clone();
            e2[i] = &e2[i] - &ExponentExpr::int(1);
            out.push(coeff, e2);
        }
        out
    }

    /// Substitute the rational alpha and evaluate at `(x, t, u, v)`.
    pub fn evaluate(&self, alpha: &BigRational, point: [f64; 4]) -> Result<f64> {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut term = c.eval_f64(alpha)?;
            for var in Var::ALL {
                let p = e[var as usize].eval(alpha);
                term *= pow_checked(point[var as usize], &p, var)?;
            }
            acc += term;
        }
        Ok(acc)
    }
}

/// Power with the strict real-domain rule used for monomial evaluation:
/// nonpositive bases only admit integer exponents.
pub(crate) fn pow_checked(base: f64, p: &BigRational, var: Var) -> Result<f64> {
    if p.is_integer() {
        let n = p.to_integer().to_i32().ok_or_else(|| Error::Domain(format!("exponent {p} too large")))?;
        if base == 0.0 && n < 0 {
            return Err(Error::Domain(format!("{} = 0 with exponent {p}", var.name())));
        }
        return Ok(base.powi(n));
    }
    if base <= 0.0 {
        return Err(Error::Domain(format!(
            "{} = {base} is nonpositive with non-integer exponent {p}",
            var.name()
        )));
    }
    Ok(base.powf(to_f64(p)))
}

fn fmt_factor(f: &mut fmt::Formatter<'_>, var: Var, e: &ExponentExpr) -> fmt::Result {
    if e.alpha_coeff == num_traits::Zero::zero() && e.constant.is_one() {
        write!(f, "{}", var.name())
    } else if e.alpha_coeff == num_traits::Zero::zero() && e.constant.is_integer() && e.constant > num_traits::Zero::zero() {
        write!(f, "{}^{}", var.name(), e.constant)
    } else {
        write!(f, "{}^({e})", var.name())
    }
}

impl fmt::Display for MonomialSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let has_vars = e.iter().any(|x| !x.is_zero());
            if !c.is_one() || !has_vars {
                let s = c.to_string();
                if c.denominator().degree() == Some(0) && c.numerator().coeffs().len() > 1 {
                    write!(f, "({s})")?;
                } else {
                    write!(f, "{s}")?;
                }
                if has_vars {
                    write!(f, "·")?;
                }
            }
            let mut first = true;
            for var in Var::ALL {
                let ex = &e[var as usize];
                if ex.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, "·")?;
                }
                first = false;
                fmt_factor(f, var, ex)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{int, rat};

    fn t_pow(e: ExponentExpr) -> MonomialSum {
        MonomialSum::power(Var::T, e)
    }

    #[test]
    fn add_examples() {
        let k = t_pow(ExponentExpr::alpha_plus(-1));
        assert!(k.add(&k.neg()).is_zero());
        let x = MonomialSum::var(Var::X);
        assert_eq!(x.add(&x), x.scale(&ScalarExpr::int(2)));
        let s = k.add(&x).add(&t_pow(ExponentExpr::alpha_plus(-2)));
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn multiply_examples() {
        let k = t_pow(ExponentExpr::alpha_plus(-1));
        let t = MonomialSum::var(Var::T);
        assert_eq!(k.mul(&t), t_pow(ExponentExpr::alpha_plus(0)));
        let t_over_alpha = t.scale(&ScalarExpr::alpha().inv().unwrap());
        assert_eq!(t_over_alpha.mul(&MonomialSum::constant(ScalarExpr::alpha())), t);
        // u^{1/m} with m = 1/2 times u^2
        let u2 = MonomialSum::power(Var::U, ExponentExpr::int(2));
        assert_eq!(u2.mul(&u2), MonomialSum::power(Var::U, ExponentExpr::int(4)));
    }

    #[test]
    fn differentiate_examples() {
        let t_over_alpha = MonomialSum::var(Var::T).scale(&ScalarExpr::alpha().inv().unwrap());
        assert_eq!(
            t_over_alpha.differentiate(Var::T),
            MonomialSum::constant(ScalarExpr::alpha().inv().unwrap())
        );
        let k = t_pow(ExponentExpr::alpha_plus(-1));
        let expected = t_pow(ExponentExpr::alpha_plus(-2))
            .scale(&(&ScalarExpr::alpha() - &ScalarExpr::one()));
        assert_eq!(k.differentiate(Var::T), expected);
        let xk = MonomialSum::var(Var::X).mul(&k);
        assert_eq!(xk.differentiate(Var::X), k);
    }

    #[test]
    fn evaluate_examples() {
        let k = t_pow(ExponentExpr::alpha_plus(-1));
        assert_eq!(k.evaluate(&rat(1, 2), [0.0, 4.0, 0.0, 0.0]).unwrap(), 0.5);
        let c = &(&ScalarExpr::one() - &ScalarExpr::alpha()) / &ScalarExpr::alpha();
        let f = MonomialSum::var(Var::T).scale(&c);
        assert!((f.evaluate(&rat(1, 2), [0.0, 3.0, 0.0, 0.0]).unwrap() - 3.0).abs() < 1e-15);
        let g = MonomialSum::var(Var::X).mul(&k);
        assert_eq!(g.evaluate(&rat(1, 3), [2.0, 1.0, 0.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn evaluate_errors() {
        let k = t_pow(ExponentExpr::alpha_plus(-1));
        assert!(matches!(k.evaluate(&rat(1, 2), [0.0, -1.0, 0.0, 0.0]), Err(Error::Domain(_))));
        let pole = MonomialSum::constant(ScalarExpr::alpha().inv().unwrap());
        assert!(matches!(pole.evaluate(&int(0), [0.0; 4]), Err(Error::Pole(_))));
        // integer exponents accept negative bases
        let x2 = MonomialSum::power(Var::X, ExponentExpr::int(2));
        assert_eq!(x2.evaluate(&rat(1, 2), [-3.0, 1.0, 0.0, 0.0]).unwrap(), 9.0);
    }

    #[test]
    fn display() {
        let c = &(&ScalarExpr::one() - &ScalarExpr::alpha()) / &ScalarExpr::alpha();
        let f = t_pow(ExponentExpr::alpha_plus(-1)).scale(&c);
        assert_eq!(f.to_string(), "(1 - α)/α·t^(α-1)");
        let _ = int(1);
    }
}
