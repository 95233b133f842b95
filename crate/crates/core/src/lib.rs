//! Proof-term kernel and CPS normalization by evaluation for minimal
//! intuitionistic predicate logic.

pub mod nbe;
pub mod reduction;
pub mod semantics;
pub mod syntax;
pub mod testgen;
pub mod typecheck;

pub use nbe::{normalize, Options, Strategy};
pub use reduction::{beta_eq, beta_nf, step, ReductionError};
pub use semantics::NbeError;
pub use syntax::{
    alpha_eq, parse_context, parse_formula, parse_term, Context, ContextError, Formula, Individual, Name,
    NameSupply, ParseError, ProofTerm,
};
pub use testgen::{gen_atomic_problem, gen_problem, gen_term, inject_redexes, Fragment, GenError, Problem};
pub use typecheck::{check, infer_neutral, is_neutral, is_normal, TypeError};
