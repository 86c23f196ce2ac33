//! Static safety checking and evaluation for set-comprehension languages.
//!
//! Formulas are checked against a syntactic safety relation `φ ≻ X`, which
//! certifies that the collection of `X`-tuples satisfying `φ` is a set
//! constructible from the values of the remaining free variables. Set terms
//! `{x | φ}` are legal exactly when `φ ≻ {x}`. Closed legal terms are evaluated
//! to canonical hereditarily finite sets by compiling safety derivations into
//! query plans.
//!
//! The crate is organised as:
//!
//! - [`syntax`]: terms, formulas, free variables, substitution, α-equivalence.
//! - [`parser`]: concrete syntax, definitions (macros), pretty printing.
//! - [`safety`]: the safety relation, rule packs, derivations.
//! - [`eval`]: hereditarily finite values, query plans, evaluation, rewriting.
//! - [`catalog`]: the standard abbreviation prelude.
//! - [`theory`]: a session facade tying the pieces together.

pub mod catalog;
pub mod eval;
pub mod parser;
pub mod safety;
pub mod syntax;
pub mod theory;

pub use eval::{Budget, Env, EvalError, Hf};
pub use parser::{Definitions, ParseError};
pub use safety::{Derivation, SafetyError, SafetyFamily, TheoryConfig};
pub use syntax::{Expr, Formula, Term, Var, VarSet};
pub use theory::Theory;
