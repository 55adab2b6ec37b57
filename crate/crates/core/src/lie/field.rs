use num_rational::BigRational;
use std::fmt;

use crate::error::Result;
use crate::symbolic::{MonomialSum, ScalarExpr, Var};

/// Infinitesimal generator `xi ∂x + tau ∂t + mu ∂u + phi ∂v`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct VectorField {
    pub xi: MonomialSum,
    pub tau: MonomialSum,
    pub mu: MonomialSum,
    pub phi: MonomialSum,
}

impl VectorField {
    pub fn new(xi: MonomialSum, tau: MonomialSum, mu: MonomialSum, phi: MonomialSum) -> Self {
        VectorField { xi, tau, mu, phi }
    }

    pub fn zero() -> Self {
        VectorField::default()
    }

    /// Coefficients in the variable order (x, t, u, v).
    pub fn components(&self) -> [&MonomialSum; 4] {
        [&self.xi, &self.tau, &self.mu, &self.phi]
    }

    fn from_components(c: [MonomialSum; 4]) -> Self {
        let [xi, tau, mu, phi] = c;
        VectorField { xi, tau, mu, phi }
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        let (a, b) = (self.components(), other.components());
        VectorField::from_components(std::array::from_fn(|i| a[i].add(b[i])))
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.add(&other.scale(&ScalarExpr::int(-1)))
    }

    pub fn scale(&self, c: &ScalarExpr) -> VectorField {
        let a = self.components();
        VectorField::from_components(std::array::from_fn(|i| a[i].scale(c)))
    }

    /// `Σ c_i F_i`.
    pub fn linear_combination(terms: &[(ScalarExpr, &VectorField)]) -> VectorField {
        terms.iter().fold(VectorField::zero(), |acc, (c, f)| acc.add(&f.scale(c)))
    }

    /// The derivation `X(f) = Σ_w X_w ∂_w f`.
    pub fn apply(&self, f: &MonomialSum) -> MonomialSum {
        let mut out = MonomialSum::zero();
        for (coef, var) in self.components().into_iter().zip(Var::ALL) {
            if coef.is_zero() {
                continue;
            }
            out = out.add(&coef.mul(&f.differentiate(var)));
        }
        out
    }

    /// Numeric coefficients at a point of (x, t, u, v).
    pub fn evaluate(&self, alpha: &BigRational, point: [f64; 4]) -> Result<[f64; 4]> {
        let c = self.components();
        Ok([
            c[0].evaluate(alpha, point)?,
            c[1].evaluate(alpha, point)?,
            c[2].evaluate(alpha, point)?,
            c[3].evaluate(alpha, point)?,
        ])
    }
}

/// Commutator `[X, Y]`, computed componentwise as `X(Y_w) - Y(X_w)`.
pub fn bracket(x: &VectorField, y: &VectorField) -> VectorField {
    let (xc, yc) = (x.components(), y.components());
    VectorField::from_components(std::array::from_fn(|i| x.apply(yc[i]).sub(&y.apply(xc[i]))))
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (c, var) in self.components().into_iter().zip(Var::ALL) {
            if c.is_zero() {
                continue;
            }
            if c.len() > 1 {
                parts.push(format!("({c})∂{}", var.name()));
            } else {
                parts.push(format!("{c}·∂{}", var.name()));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::ExponentExpr;

    fn d(var: Var, coef: MonomialSum) -> VectorField {
        let mut c: [MonomialSum; 4] = Default::default();
        c[var as usize] = coef;
        VectorField::from_components(c)
    }

    #[test]
    fn heisenberg_like_bracket() {
        // [∂x, x∂v] = ∂v
        let a = d(Var::X, MonomialSum::one());
        let b = d(Var::V, MonomialSum::var(Var::X));
        assert_eq!(bracket(&a, &b), d(Var::V, MonomialSum::one()));
        assert_eq!(bracket(&b, &a), d(Var::V, MonomialSum::one()).scale(&ScalarExpr::int(-1)));
        assert!(bracket(&a, &a).is_zero());
    }

    #[test]
    fn scaling_field_on_kernel() {
        // [t^{α-1}∂v, (t/α)∂t] = ((1-α)/α) t^{α-1}∂v
        let x2 = d(Var::V, MonomialSum::power(Var::T, ExponentExpr::alpha_plus(-1)));
        let inv_a = ScalarExpr::alpha().inv().unwrap();
        let x3 = d(Var::T, MonomialSum::var(Var::T).scale(&inv_a));
        let c = &(&ScalarExpr::one() - &ScalarExpr::alpha()) / &ScalarExpr::alpha();
        assert_eq!(bracket(&x2, &x3), x2.scale(&c));
    }
}
