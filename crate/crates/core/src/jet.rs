//! Second-order forward-mode jets: a value with its first and second
//! derivatives along one direction.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Jet { v, d1: 0.0, d2: 0.0 }
    }

    /// The independent variable itself at `v`.
    pub const fn variable(v: f64) -> Self {
        Jet { v, d1: 1.0, d2: 0.0 }
    }

    /// Chain rule for a scalar function with derivatives `f0, f1, f2` at `self.v`.
    pub fn chain(self, f0: f64, f1: f64, f2: f64) -> Jet {
        Jet { v: f0, d1: f1 * self.d1, d2: f2 * self.d1 * self.d1 + f1 * self.d2 }
    }

    /// Real power for a positive base.
    pub fn powf(self, p: f64) -> Jet {
        if p == 0.0 {
            return Jet::constant(1.0);
        }
        let x = self.v;
        let f0 = x.powf(p);
        self.chain(f0, p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }

    /// Power with an exponent given as a reduced fraction `num/den`, real for
    /// negative bases when `den` is odd.
    pub fn pow_ratio(self, num: i64, den: i64) -> Jet {
        let p = num as f64 / den as f64;
        if self.v >= 0.0 || den % 2 == 0 {
            return self.powf(p);
        }
        let sign = if num % 2 == 0 { 1.0 } else { -1.0 };
        let r = (-self).powf(p);
        // the reflection's -1 is carried by the chain rule inside (-self)
        Jet { v: sign * r.v, d1: sign * r.d1, d2: sign * r.d2 }
    }

    pub fn powi(self, n: i32) -> Jet {
        if n == 0 {
            return Jet::constant(1.0);
        }
        let x = self.v;
        let nf = n as f64;
        self.chain(x.powi(n), nf * x.powi(n - 1), nf * (nf - 1.0) * x.powi(n - 2))
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Jet {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn tan(self) -> Jet {
        let t = self.v.tan();
        let s = 1.0 + t * t;
        self.chain(t, s, 2.0 * t * s)
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn scale(self, c: f64) -> Jet {
        Jet { v: c * self.v, d1: c * self.d1, d2: c * self.d2 }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, r: Jet) -> Jet {
        Jet { v: self.v + r.v, d1: self.d1 + r.d1, d2: self.d2 + r.d2 }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, r: Jet) -> Jet {
        Jet { v: self.v - r.v, d1: self.d1 - r.d1, d2: self.d2 - r.d2 }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, r: Jet) -> Jet {
        Jet {
            v: self.v * r.v,
            d1: self.d1 * r.v + self.v * r.d1,
            d2: self.d2 * r.v + 2.0 * self.d1 * r.d1 + self.v * r.d2,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, r: Jet) -> Jet {
        let x = r.v;
        let inv = r.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
        self * inv
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, r: f64) -> Jet {
        Jet { v: self.v + r, ..self }
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, r: f64) -> Jet {
        Jet { v: self.v - r, ..self }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, r: f64) -> Jet {
        self.scale(r)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, r: Jet) -> Jet {
        r.scale(self)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, r: f64) -> Jet {
        self.scale(1.0 / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn product_and_quotient_rules() {
        let x = Jet::variable(1.3);
        let f = x * x.exp() / (x + 1.0);
        // f = x e^x/(x+1), f' = e^x (x^2+x+1)/(x+1)^2
        let e = 1.3f64.exp();
        assert!(close(f.d1, e * (1.3 * 1.3 + 1.3 + 1.0) / (2.3 * 2.3)));
        let h = 1e-4;
        let g = |s: f64| s * s.exp() / (s + 1.0);
        let fd2 = (g(1.3 + h) - 2.0 * g(1.3) + g(1.3 - h)) / (h * h);
        assert!((f.d2 - fd2).abs() < 1e-6);
    }

    #[test]
    fn odd_root_of_negative_base() {
        let x = Jet::variable(-8.0);
        let c = x.pow_ratio(1, 3);
        assert!(close(c.v, -2.0));
        // d/dx x^{1/3} = (1/3) x^{-2/3} = 1/12 at -8
        assert!(close(c.d1, 1.0 / 12.0));
        let s = x.pow_ratio(2, 3);
        assert!(close(s.v, 4.0));
        assert!(close(s.d1, -1.0 / 3.0));
    }

    #[test]
    fn tan_derivatives() {
        let x = Jet::variable(0.4);
        let t = x.tan();
        let sec2 = 1.0 + 0.4f64.tan().powi(2);
        assert!(close(t.d1, sec2));
        assert!(close(t.d2, 2.0 * 0.4f64.tan() * sec2));
    }
}
