use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::poly::Poly;
use super::scalar::ScalarExpr;
use crate::error::{Error, Result};

/// Exponent of the form `a + b*alpha` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExponentExpr {
    pub constant: BigRational,
    pub alpha_coeff: BigRational,
}

impl ExponentExpr {
    pub fn new(constant: BigRational, alpha_coeff: BigRational) -> Self {
        ExponentExpr { constant, alpha_coeff }
    }

    pub fn zero() -> Self {
        ExponentExpr::default()
    }

    pub fn constant(c: BigRational) -> Self {
        ExponentExpr::new(c, BigRational::zero())
    }

    pub fn int(n: i64) -> Self {
        ExponentExpr::constant(BigRational::from_integer(n.into()))
    }

    /// `alpha + c`.
    pub fn alpha_plus(c: i64) -> Self {
        ExponentExpr::new(BigRational::from_integer(c.into()), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.alpha_coeff.is_zero()
    }

    pub fn eval(&self, alpha: &BigRational) -> BigRational {
        &self.constant + &self.alpha_coeff * alpha
    }

    pub fn to_scalar(&self) -> ScalarExpr {
        ScalarExpr::poly(Poly::linear(self.constant.clone(), self.alpha_coeff.clone()))
    }

    /// Scale by a rational.
    pub fn scale(&self, c: &BigRational) -> Self {
        ExponentExpr::new(&self.constant * c, &self.alpha_coeff * c)
    }

    /// Exact decision of `self > -1` at the given alpha.
    pub fn exceeds_minus_one(&self, alpha: &BigRational) -> bool {
        self.eval(alpha) > -BigRational::one()
    }

    /// Exponent built from an alpha-dependent ScalarExpr, when that
    /// expression is affine in alpha.
    pub fn from_scalar(s: &ScalarExpr) -> Result<Self> {
        let den = s
            .denominator()
            .as_constant()
            .ok_or_else(|| Error::InvalidInput(format!("exponent {s} is not affine in alpha")))?;
        let num = s.numerator();
        if num.degree().unwrap_or(0) > 1 {
            return Err(Error::InvalidInput(format!("exponent {s} is not affine in alpha")));
        }
        let c = |i: usize| num.coeffs().get(i).cloned().unwrap_or_else(BigRational::zero) / &den;
        Ok(ExponentExpr::new(c(0), c(1)))
    }
}

impl Add for &ExponentExpr {
    type Output = ExponentExpr;
    fn add(self, rhs: &ExponentExpr) -> ExponentExpr {
        ExponentExpr::new(&self.constant + &rhs.constant, &self.alpha_coeff + &rhs.alpha_coeff)
    }
}

impl Sub for &ExponentExpr {
    type Output = ExponentExpr;
    fn sub(self, rhs: &ExponentExpr) -> ExponentExpr {
        ExponentExpr::new(&self.constant - &rhs.constant, &self.alpha_coeff - &rhs.alpha_coeff)
    }
}

impl Neg for &ExponentExpr {
    type Output = ExponentExpr;
    fn neg(self) -> ExponentExpr {
        ExponentExpr::new(-&self.constant, -&self.alpha_coeff)
    }
}

impl fmt::Display for ExponentExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = &self.alpha_coeff;
        let a = &self.constant;
        if b.is_zero() {
            return write!(f, "{a}");
        }
        if b.is_one() {
            write!(f, "α")?;
        } else if *b == -BigRational::one() {
            write!(f, "-α")?;
        } else {
            write!(f, "{b}·α")?;
        }
        if a.is_positive() {
            write!(f, "+{a}")?;
        } else if a.is_negative() {
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl Serialize for ExponentExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{int, rat};

    #[test]
    fn boundary_decided_exactly() {
        // alpha - 2 at alpha = 1 is exactly -1: not > -1
        let e = ExponentExpr::alpha_plus(-2);
        assert!(!e.exceeds_minus_one(&int(1)));
        assert!(e.exceeds_minus_one(&rat(3, 2)));
    }

    #[test]
    fn display() {
        assert_eq!(ExponentExpr::alpha_plus(-1).to_string(), "α-1");
        assert_eq!(ExponentExpr::new(int(0), rat(-1, 2)).to_string(), "-1/2·α");
    }
}
