//! Numerical oracles: singular-kernel quadrature for the fractional
//! derivative, residuals of the system and its reductions, and a
//! memory-aware time stepper.

mod evolve;
mod quadrature;
mod reference;
mod report;
mod residual;
mod rl_numeric;

pub use quadrature::{gauss_jacobi, gauss_legendre, integrate_adaptive, GaussRule};
pub use report::{linspace, EquationResidual, EvalPath, FnPair, GridSpec, PairEvaluator, PairJets, ResidualReport};
pub use rl_numeric::{rl_derivative_numeric, QuadratureSpec, SingularRule};
pub use residual::{reduced_ode_residual, residual_system, sequential_residual, PathChoice, ReducedProfile};
pub use evolve::{convergence_order, convergence_study, evolve, ConvergenceStudy, EvolveReport, Rung, Trajectory, INSTABILITY_FACTOR};
pub use reference::{
    cross_check_deviation, curve_window, default_grid, implicit_cross_checks, reference_cases, ReferenceCase, CROSS_CHECK_TOL,
    EXACT_TOL, QUADRATURE_TOL,
};
