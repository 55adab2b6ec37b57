//! Explicit and implicit invariant solutions with their validity domains.

mod explicit;
mod family;
mod implicit;
mod lemma2;

pub use explicit::{
    family_19, family_21, family_22, family_5_1, family_5_4, family_5_5, power_coefficients, power_rule_factor,
    PowerCoefficients,
};
pub use family::{
    reflect_dependent, sign_flip, zero_family, Component, Coupling, Domain, GeneratorRef, SolutionFamily, TimeTerm,
};
pub use implicit::{family_20_implicit, ImplicitCurve};
pub use lemma2::{lemma2_solve, Lemma2Solution};
