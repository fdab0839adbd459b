//! Functional equations of generalized mean-value type and the checks run
//! against them.

mod checks;
pub mod fixtures;
mod pde;
mod spec;

pub use checks::{
    check_all, check_assumptions, check_corollary, check_swiatak, check_theorem21, check_theorem23, residual,
    AnchorResidual, AssumptionReport, CheckReport, SampleViolation, Sampling, TheoremReport, Verdict, Witness,
};
pub use pde::{derive_pde, verify_identity_34, DeriveError, DerivedPde, IdentityError, IdentityReport};
pub use spec::{FunctionalEquationSpec, RhsSpec, SpecError, Term};
