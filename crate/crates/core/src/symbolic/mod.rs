//! Exact arithmetic for alpha-parametric monomial sums and the fractional
//! power rule in t.

mod alpha;
mod exponent;
mod fractional;
mod monomial;
mod poly;
mod scalar;

pub use alpha::AlphaParameter;
pub use exponent::ExponentExpr;
pub use fractional::{rl_derivative_t, GammaRatio, GammaSum};
pub use monomial::{Exponents, Monomial, MonomialSum, Var};
pub use poly::Poly;
pub use scalar::ScalarExpr;
