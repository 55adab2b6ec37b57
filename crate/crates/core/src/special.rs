//! Gamma function and sign-aware real powers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments.
///
/// Uses the reflection formula below 1/2. Returns NaN at the poles
/// (nonpositive integers); callers that need pole detection should go
/// through [`gamma_rational`].
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    // integers up to 20 are exact as factorials
    if x == x.floor() && x <= 21.0 {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return acc;
    }
    let x = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * sum
}

/// True when `r` is an integer `<= 0`, i.e. a pole of the gamma function.
pub fn is_gamma_pole(r: &BigRational) -> bool {
    r.is_integer() && !r.is_positive()
}

/// Gamma at an exact rational argument, reporting poles as
/// [`Error::SingularParameter`].
pub fn gamma_rational(r: &BigRational) -> Result<f64> {
    if is_gamma_pole(r) {
        return Err(Error::SingularParameter(r.to_string()));
    }
    Ok(gamma(to_f64(r)))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `x^r` over the reals for a rational exponent.
///
/// A negative base is allowed only when the reduced denominator of `r` is
/// odd; the result then carries the sign `(-1)^numerator`.
pub fn real_pow(x: f64, r: &BigRational) -> Result<f64> {
    if r.is_zero() {
        return Ok(1.0);
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite base {x}")));
    }
    let e = to_f64(r);
    if x > 0.0 {
        if r.is_integer() {
            if let Some(n) = r.to_integer().to_i32() {
                return Ok(x.powi(n));
            }
        }
        return Ok(x.powf(e));
    }
    if x == 0.0 {
        return if r.is_positive() {
            Ok(0.0)
        } else {
            Err(Error::Domain(format!("0 raised to the power {r}")))
        };
    }
    if r.denom().is_even() {
        return Err(Error::NonrealRoot(format!("({x})^({r})")));
    }
    let magnitude = if r.is_integer() {
        match r.to_integer().to_i32() {
            Some(n) => x.abs().powi(n),
            None => x.abs().powf(e),
        }
    } else {
        x.abs().powf(e)
    };
    Ok(if r.numer().is_odd() { -magnitude } else { magnitude })
}

/// Parse `"p/q"` or `"p"` into an exact rational. Decimal notation is
/// rejected.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("expected an exact rational like 1/3, got {s:?}"));
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return Err(bad());
    }
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// `1` as a rational; handy in expression-heavy code.
pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_reference_values() {
        let sqrt_pi = PI.sqrt();
        assert!(rel(gamma(0.5), sqrt_pi) < 1e-14);
        assert!(rel(gamma(1.5), sqrt_pi / 2.0) < 1e-14);
        assert!(rel(gamma(-0.5), -2.0 * sqrt_pi) < 1e-14);
        assert!(rel(gamma(1.0 / 3.0), 2.678_938_534_707_747_8) < 1e-13);
        assert!(rel(gamma(0.25), 3.625_609_908_221_908_3) < 1e-13);
        assert!(rel(gamma(2.0 / 3.0), 1.354_117_939_426_400_5) < 1e-13);
        assert!(rel(gamma(-0.25), -4.901_666_809_860_711) < 1e-13);
        assert_eq!(gamma(5.0), 24.0);
        assert!(rel(gamma(10.5), 1_133_278.388_948_785_6) < 1e-13);
    }

    #[test]
    fn gamma_recurrence_holds() {
        for i in 1..200 {
            let x = -3.95 + i as f64 * 0.0437;
            if (x - x.round()).abs() < 1e-6 {
                continue;
            }
            let lhs = gamma(x + 1.0);
            let rhs = x * gamma(x);
            assert!(rel(lhs, rhs) < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn gamma_poles() {
        assert!(gamma(0.0).is_nan());
        assert!(gamma(-3.0).is_nan());
        assert!(matches!(gamma_rational(&int(-1)), Err(Error::SingularParameter(_))));
        assert!(gamma_rational(&rat(-1, 2)).is_ok());
    }

    #[test]
    fn real_pow_sign_rules() {
        assert_eq!(real_pow(-8.0, &rat(1, 3)).unwrap(), -2.0);
        assert!((real_pow(-8.0, &rat(2, 3)).unwrap() - 4.0).abs() < 1e-14);
        assert!(matches!(real_pow(-1.0, &rat(1, 2)), Err(Error::NonrealRoot(_))));
        assert_eq!(real_pow(-2.0, &int(-1)).unwrap(), -0.5);
        assert_eq!(real_pow(0.0, &rat(1, 2)).unwrap(), 0.0);
        assert!(real_pow(0.0, &rat(-1, 2)).is_err());
    }

    #[test]
    fn parse_rejects_decimals() {
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
