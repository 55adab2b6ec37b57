//! Symbolic-numeric toolkit for the time-fractional system
//! `D^α u = v_x`, `D^α v = b²(u) u_x`: exact power-rule calculus, Lie
//! algebras of its symmetries, similarity reductions, closed-form invariant
//! solutions and numerical residual checks.

pub mod catalog;
pub mod error;
pub mod jet;
pub mod lie;
pub mod selftest;
pub mod special;
pub mod solutions;
pub mod symbolic;
pub mod verify;

pub use error::{Error, Result};
pub use jet::Jet;
pub use symbolic::{
    rl_derivative_t, AlphaParameter, ExponentExpr, GammaSum, Monomial, MonomialSum, ScalarExpr, Var,
};
