//! Evaluation of closed valid expressions to hereditarily finite sets.
//!
//! A comprehension `{x | φ}` is evaluated by compiling a derivation of
//! `φ ≻ {x}` into a [`Plan`] and running it. Every clause of the safety
//! relation without a rule pack has a plan node; derivations that use
//! separation, replacement or powerset clauses are rejected as
//! [`EvalError::NotEvaluable`].

mod codec;
mod exec;
mod hf;
mod plan;
mod rewrite;

pub use codec::{render, NatCodec, PairCodec, Style};
pub use exec::{eval_bool, eval_term, execute_plan, Evaluator, Relation};
pub use hf::Hf;
pub use plan::{compile, Node, Plan, TcMode};
pub use rewrite::{beta_eta, simplify, Simplified};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::safety::SafetyError;
use crate::syntax::Var;

/// Steps allowed when no budget is given.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("not evaluable: {reason}")]
    NotEvaluable { reason: String },
    #[error("budget of {limit} steps exceeded")]
    BudgetExceeded { consumed: u64, limit: u64 },
    #[error("unbound variable `{0}`")]
    UnboundVariable(Var),
    #[error(transparent)]
    Unsupported(#[from] SafetyError),
}

impl EvalError {
    pub(crate) fn not_evaluable(reason: impl Into<String>) -> Self {
        EvalError::NotEvaluable { reason: reason.into() }
    }
}

/// A step counter. One step is one enumerated element or one plan node firing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used
    }

    pub fn tick(&mut self, n: u64) -> Result<(), EvalError> {
        self.used = self.used.saturating_add(n).min(self.limit);
        if self.used >= self.limit {
            return Err(EvalError::BudgetExceeded { consumed: self.used, limit: self.limit });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

/// Variable bindings, innermost last.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env {
    vars: Vec<(Var, Hf)>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn with(mut self, v: impl Into<Var>, val: Hf) -> Self {
        self.push(v.into(), val);
        self
    }

    pub fn push(&mut self, v: Var, val: Hf) {
        self.vars.push((v, val));
    }

    pub fn pop(&mut self, n: usize) {
        let len = self.vars.len();
        self.vars.truncate(len - n);
    }

    pub fn get(&self, v: &Var) -> Option<&Hf> {
        self.vars.iter().rev().find(|(w, _)| w == v).map(|(_, h)| h)
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.get(v).is_some()
    }

    pub(crate) fn len(&self) -> usize {
        self.vars.len()
    }

    pub(crate) fn truncate(&mut self, n: usize) {
        self.vars.truncate(n);
    }

    /// The visible bindings, by variable.
    pub fn bindings(&self) -> BTreeMap<Var, Hf> {
        let mut m = BTreeMap::new();
        for (v, h) in &self.vars {
            m.insert(v.clone(), h.clone());
        }
        m
    }
}

impl FromIterator<(Var, Hf)> for Env {
    fn from_iter<I: IntoIterator<Item = (Var, Hf)>>(iter: I) -> Self {
        Env { vars: iter.into_iter().collect() }
    }
}
