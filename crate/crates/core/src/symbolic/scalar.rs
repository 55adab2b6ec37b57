use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::poly::Poly;
use crate::error::{Error, Result};
use crate::special::to_f64;

/// Rational function of alpha with exact rational coefficients.
///
/// Always stored in lowest terms with a monic denominator, so structural
/// equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarExpr {
    num: Poly,
    den: Poly,
}

impl ScalarExpr {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "ScalarExpr with identically zero denominator");
        if num.is_zero() {
            return ScalarExpr::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading();
        let inv = BigRational::one() / lead;
        ScalarExpr { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn zero() -> Self {
        ScalarExpr { num: Poly::zero(), den: Poly::constant(BigRational::one()) }
    }

    pub fn one() -> Self {
        ScalarExpr::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        ScalarExpr { num: Poly::constant(c), den: Poly::constant(BigRational::one()) }
    }

    pub fn int(n: i64) -> Self {
        ScalarExpr::constant(BigRational::from_integer(n.into()))
    }

    /// The symbol alpha itself.
    pub fn alpha() -> Self {
        ScalarExpr::poly(Poly::linear(BigRational::zero(), BigRational::one()))
    }

    pub fn poly(p: Poly) -> Self {
        ScalarExpr { num: p, den: Poly::constant(BigRational::one()) }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.degree() == Some(0) && self.num == self.den
    }

    /// Some(c) when the expression does not depend on alpha.
    pub fn as_constant(&self) -> Option<BigRational> {
        match (self.num.as_constant(), self.den.as_constant()) {
            (Some(n), Some(d)) => Some(n / d),
            _ => None,
        }
    }

    pub fn inv(&self) -> Result<ScalarExpr> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero scalar".into()));
        }
        Ok(ScalarExpr::new(self.den.clone(), self.num.clone()))
    }

    /// Substitute an exact alpha.
    pub fn eval(&self, alpha: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(alpha);
        if d.is_zero() {
            return Err(Error::Pole(alpha.to_string()));
        }
        Ok(self.num.eval(alpha) / d)
    }

    pub fn eval_f64(&self, alpha: &BigRational) -> Result<f64> {
        self.eval(alpha).map(|r| to_f64(&r))
    }

    fn needs_parens(p: &Poly) -> bool {
        p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1
    }
}

impl Default for ScalarExpr {
    fn default() -> Self {
        ScalarExpr::zero()
    }
}

impl From<BigRational> for ScalarExpr {
    fn from(c: BigRational) -> Self {
        ScalarExpr::constant(c)
    }
}

impl From<i64> for ScalarExpr {
    fn from(n: i64) -> Self {
        ScalarExpr::int(n)
    }
}

impl Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        if self.den == rhs.den {
            return ScalarExpr::new(self.num.add(&rhs.num), self.den.clone());
        }
        ScalarExpr::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        self + &(-rhs)
    }
}

impl Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() || rhs.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl Div for &ScalarExpr {
    type Output = ScalarExpr;
    /// Panics on division by the zero expression.
    fn div(self, rhs: &ScalarExpr) -> ScalarExpr {
        assert!(!rhs.is_zero(), "ScalarExpr division by zero");
        ScalarExpr::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr { num: self.num.neg(), den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            if ScalarExpr::needs_parens(p) {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{int, rat};

    fn a() -> ScalarExpr {
        ScalarExpr::alpha()
    }

    #[test]
    fn cancellation_is_canonical() {
        // (1/alpha) * alpha == 1
        let e = &a().inv().unwrap() * &a();
        assert!(e.is_one());
        // (alpha^2 - 1)/(alpha - 1) == alpha + 1
        let num = &(&a() * &a()) - &ScalarExpr::one();
        let den = &a() - &ScalarExpr::one();
        assert_eq!(&num / &den, &a() + &ScalarExpr::one());
    }

    #[test]
    fn one_minus_alpha_over_alpha() {
        let e = &(&ScalarExpr::one() - &a()) / &a();
        assert_eq!(e.to_string(), "(1 - α)/α");
        assert_eq!(e.eval(&rat(1, 2)).unwrap(), int(1));
        assert!(matches!(e.eval(&int(0)), Err(Error::Pole(_))));
    }

    #[test]
    fn denominator_sign_normalised() {
        let e = ScalarExpr::new(Poly::constant(int(1)), Poly::linear(int(0), int(-2)));
        assert_eq!(e.denominator(), &Poly::linear(int(0), int(1)));
        assert_eq!(e.numerator(), &Poly::constant(rat(-1, 2)));
    }
}
