//! The safety relation `φ ≻ X` and the validity of set terms.
//!
//! Two routes decide the relation:
//!
//! - [`safe_sets`] computes the whole downward-closed family of safe sets,
//!   represented by its maximal members.
//! - [`check_safe`] decides a single `X` goal-directed and returns a
//!   replayable [`Derivation`].
//!
//! Both honour the rule packs enabled in a [`TheoryConfig`].

pub(crate) mod check;
mod config;
mod derivation;
mod family;

pub use check::{check_safe, explain_failure, validate_formula, validate_term, Blame, Validation, Violation};
pub use config::{Pack, TheoryConfig};
pub use derivation::{Derivation, Rule};
pub use family::{safe_sets, SafetyFamily};

use thiserror::Error;

use crate::syntax::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SafetyError {
    #[error("unsupported construct: {construct} requires {requires}")]
    UnsupportedConstruct {
        construct: &'static str,
        requires: &'static str,
    },
}

/// Rejects constructs whose rule pack is disabled.
pub fn check_supported_formula(f: &Formula, cfg: &TheoryConfig) -> Result<(), SafetyError> {
    match f {
        Formula::Mem(a, b) | Formula::Eq(a, b) => {
            check_supported_term(a, cfg)?;
            check_supported_term(b, cfg)
        }
        Formula::Sub(a, b) => {
            if !cfg.subseteq_atom {
                return Err(SafetyError::UnsupportedConstruct {
                    construct: "⊆ atom",
                    requires: "the subseteq pack",
                });
            }
            check_supported_term(a, cfg)?;
            check_supported_term(b, cfg)
        }
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => {
            check_supported_formula(a, cfg)
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            check_supported_formula(a, cfg)?;
            check_supported_formula(b, cfg)
        }
        Formula::Tc(c) => {
            if !cfg.tc {
                return Err(SafetyError::UnsupportedConstruct {
                    construct: "TC",
                    requires: "the tc pack (theory pzf)",
                });
            }
            check_supported_formula(&c.body, cfg)?;
            check_supported_term(&c.from, cfg)?;
            check_supported_term(&c.to, cfg)
        }
    }
}

pub fn check_supported_term(t: &Term, cfg: &TheoryConfig) -> Result<(), SafetyError> {
    match t {
        Term::Var(_) => Ok(()),
        Term::Const(_) if !cfg.hf_constant => Err(SafetyError::UnsupportedConstruct {
            construct: "the constant HF",
            requires: "theory rst-omega",
        }),
        Term::Const(_) => Ok(()),
        Term::Compr(c) => check_supported_formula(&c.body, cfg),
    }
}
