//! One-step satisfiability and one-step consistency.
//!
//! A one-step problem fixes a finite set `X`, a valuation `tau` of
//! propositional variables as subsets of `X`, and a set `xi` of formulas with
//! exactly one layer of modal operators over propositional arguments.

mod consistency;
mod problem;
mod solver;

pub use consistency::{agreement_check, one_step_consistent, verify_one_step_soundness, AgreementReport};
pub use problem::{OneStepFile, OneStepProblem};
pub use solver::{solve, Atom, AtomTable, BExpr, OneStepOutcome};

use crate::coalgebra::{Functor, SearchBounds};
use crate::error::Result;

/// Searches for `t` in `TX` satisfying every formula of `p.xi` under `tau`.
pub fn one_step_sat(p: &OneStepProblem, functor: &Functor, bounds: &SearchBounds) -> Result<OneStepOutcome> {
    p.validate()?;
    let (atoms, constraint) = p.compile(functor)?;
    solve(functor, p.n(), &atoms, &constraint, bounds)
}
