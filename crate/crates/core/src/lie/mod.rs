//! Lie brackets, structure constants and adjoint actions for algebras of
//! vector fields with monomial-sum coefficients.

mod adjoint;
mod algebra;
mod field;

pub use adjoint::{
    adjoint_action, adjoint_form, equivalence_solve, AdjointForm, Equivalence, EquivalenceOutcome, TargetCoord,
};
pub use algebra::{ad_matrix, decompose, decompose_over, direct_sum_check, structure_constants, AlgebraElement, LieAlgebra};
pub use field::{bracket, VectorField};
