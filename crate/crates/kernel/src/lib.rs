//! Kernel for an intensional dependent type theory with identity types,
//! Π, Σ, the finite types 0, 1, 2, W-types and one universe.
//!
//! Two rule sets are supported. In strict mode the eliminators of 1, 2 and
//! W compute on canonical forms; in propositional mode those computations
//! only hold up to identity proofs supplied by dedicated constants.

#![allow(clippy::result_large_err)]

pub mod diag;
pub mod env;
pub mod reduce;
pub mod rules;
pub mod surface;
pub mod term;

pub use diag::{Diagnostic, ErrorCode, Pos, Span};
pub use env::Env;
pub use reduce::{conv, normalize, whnf, Fuel, Mode, DEFAULT_FUEL};
pub use rules::{CheckedEnv, Checker};
pub use term::{shift, subst, syntactic_eq, Context, Declaration, Name, Node, Term};
