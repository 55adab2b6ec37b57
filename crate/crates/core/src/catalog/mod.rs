//! Group classification, optimal systems, similarity reductions and the
//! reference tables, encoded as data.

mod case;
mod claims;
mod optimal;
mod reduction;
mod tables;

pub use case::{
    basis_change, degeneracy, degeneracy_expr, generators, kernel_solutions, m_expr, y_in_x, ClassificationCase,
    KernelMember, Subcase, SymmetryRecord,
};
pub use claims::{
    case21_claims, case22_claims, check_equivalence, claims_for, coincidence_checks, default_case22_a, CoincidenceCheck,
    EquivalenceCheck, EquivalenceClaim, COINCIDENCE_TOL, EQUIVALENCE_TOL,
};
pub use optimal::{
    optimal_element, optimal_system, param_f64, param_or_zero, params, OptimalSystemElement, ParamLinear, ParamRange,
    ParamSpec, ParamValues,
};
pub use reduction::{
    case21_form, case22_form, invariance_surface_residual, sample_profiles, similarity_reduction, u5_hypothesis,
    Formula, FormPair, InvariantForm, Profile, ReducedSystem, ReductionOutcome, SimilarityReduction,
};
pub use tables::{
    catalog_case, catalog_document, compare_adjoint, compare_commutator, compute_adjoint_table, expected_adjoint,
    expected_commutator, table_algebra, tables_for, CatalogCase, CatalogDocument, CatalogElement, TableId,
    TableMismatch,
};
