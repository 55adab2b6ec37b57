use num_rational::BigRational;
use num_traits::{One, Signed};
use std::fmt;

use crate::error::{Error, Result};
use crate::special::{parse_rational, to_f64};

/// Fractional order alpha: a positive, non-integer exact rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlphaParameter(BigRational);

impl AlphaParameter {
    pub fn new(value: BigRational) -> Result<Self> {
        if !value.is_positive() {
            return Err(Error::InvalidInput(format!("alpha must be positive, got {value}")));
        }
        if value.is_integer() {
            return Err(Error::InvalidInput(format!("alpha must not be an integer, got {value}")));
        }
        Ok(AlphaParameter(value))
    }

    pub fn from_ratio(n: i64, d: i64) -> Result<Self> {
        AlphaParameter::new(crate::special::rat(n, d))
    }

    pub fn parse(s: &str) -> Result<Self> {
        AlphaParameter::new(parse_rational(s)?)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn as_f64(&self) -> f64 {
        to_f64(&self.0)
    }

    /// The catalog restriction `0 < alpha < 1`.
    pub fn in_unit_interval(&self) -> bool {
        self.0 < BigRational::one()
    }

    pub fn require_unit_interval(&self) -> Result<()> {
        if self.in_unit_interval() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("requires 0 < alpha < 1, got {}", self.0)))
        }
    }

    /// Integer n with n - 1 < alpha < n.
    pub fn ceil(&self) -> i64 {
        use num_traits::ToPrimitive;
        self.0.ceil().to_integer().to_i64().unwrap_or(i64::MAX)
    }
}

impl fmt::Display for AlphaParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_integers_and_nonpositive() {
        assert!(AlphaParameter::from_ratio(1, 1).is_err());
        assert!(AlphaParameter::from_ratio(0, 3).is_err());
        assert!(AlphaParameter::from_ratio(-1, 3).is_err());
        assert!(AlphaParameter::from_ratio(4, 2).is_err());
        let a = AlphaParameter::from_ratio(2, 6).unwrap();
        assert_eq!(a.to_string(), "1/3");
        assert_eq!(a.ceil(), 1);
        assert_eq!(AlphaParameter::from_ratio(3, 2).unwrap().ceil(), 2);
    }
}
