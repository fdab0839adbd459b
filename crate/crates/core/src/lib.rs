//! Symbolic analysis of generalized mean-value functional equations
//!
//! `sum_j a_j(x,t) f(x + phi_j(t)) = F(x, f(lambda_1(x)), ...) + b(x,t)`:
//! construction of the associated vector fields, iterated Lie brackets,
//! pointwise rank tests for the regularity criteria, the second-order
//! operator obtained at the anchor parameter, and finite-difference
//! cross-checks.

pub mod cli;
pub mod expr;
pub mod feq;
pub mod hormander;
pub mod linalg;
pub mod verify;
pub mod vfield;
