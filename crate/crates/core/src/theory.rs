//! A session-level facade: configuration, definitions, and the main operations.

use std::sync::Arc;

use crate::eval::{eval_bool, eval_term, Budget, Env, EvalError, Hf, DEFAULT_BUDGET};
use crate::parser::{
    parse_expr, parse_formula, parse_statement, parse_term, print_expr, Definitions, Obligation, ParseError,
    ParseOptions, Parsed, StatementKind,
};
use crate::safety::{check_safe, validate_formula, validate_term, Derivation, SafetyError, TheoryConfig, Validation};
use crate::syntax::{Expr, Formula, Term, VarSet};

/// The value of an expression: a set for terms, a truth value for formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Set(Hf),
    Bool(bool),
}

/// Outcome of checking an expression.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub validation: Validation,
    /// Side conditions of sugar forms, with whether each holds.
    pub obligations: Vec<(Obligation, bool)>,
}

impl CheckReport {
    pub fn is_ok(&self) -> bool {
        self.validation.is_ok()
    }
}

#[derive(Clone, Debug)]
pub struct Theory {
    pub config: TheoryConfig,
    pub definitions: Definitions,
    /// Step budget for evaluation.
    pub budget: u64,
}

impl Default for Theory {
    fn default() -> Self {
        Theory::new(TheoryConfig::rst())
    }
}

impl Theory {
    /// A theory with the standard prelude.
    pub fn new(config: TheoryConfig) -> Self {
        Theory { config, definitions: Definitions::standard(), budget: DEFAULT_BUDGET }
    }

    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions::for_config(&self.config)
    }

    pub fn parse(&self, src: &str) -> Result<Parsed<Expr>, ParseError> {
        parse_expr(src, &self.definitions, &self.parse_options())
    }

    pub fn parse_formula(&self, src: &str) -> Result<Formula, ParseError> {
        parse_formula(src, &self.definitions, &self.parse_options()).map(|p| p.value)
    }

    pub fn parse_term(&self, src: &str) -> Result<Term, ParseError> {
        parse_term(src, &self.definitions, &self.parse_options()).map(|p| p.value)
    }

    /// Adds `def NAME(params) := EXPR`. Returns the defined name.
    pub fn define(&mut self, src: &str) -> Result<String, ParseError> {
        let text = if src.trim_start().starts_with("def ") { src.to_string() } else { format!("def {src}") };
        let st = parse_statement(&text, 1, &self.definitions, &self.config, None)?;
        match st.kind {
            StatementKind::Define(d) => {
                let name = d.name.clone();
                self.definitions.insert(d)?;
                Ok(name)
            }
            _ => unreachable!("statement starts with def"),
        }
    }

    pub fn check(&self, parsed: &Parsed<Expr>) -> Result<CheckReport, SafetyError> {
        let validation = match &parsed.value {
            Expr::Term(t) => validate_term(t, &self.config)?,
            Expr::Formula(f) => validate_formula(f, &self.config)?,
        };
        let mut obligations = Vec::new();
        for o in &parsed.obligations {
            let holds = check_safe(&o.formula, &o.safe, &self.config)?.is_some();
            obligations.push((o.clone(), holds));
        }
        Ok(CheckReport { validation, obligations })
    }

    pub fn derive(&self, f: &Formula, x: &VarSet) -> Result<Option<Arc<Derivation>>, SafetyError> {
        check_safe(f, x, &self.config)
    }

    pub fn eval_term(&self, t: &Term, env: &Env) -> Result<Hf, EvalError> {
        eval_term(t, env, &self.config, &mut Budget::new(self.budget))
    }

    pub fn eval_bool(&self, f: &Formula, env: &Env) -> Result<bool, EvalError> {
        eval_bool(f, env, &self.config, &mut Budget::new(self.budget))
    }

    /// Evaluates a term or formula, reporting the steps used.
    pub fn eval(&self, e: &Expr, env: &Env) -> (Result<Value, EvalError>, Budget) {
        let mut budget = Budget::new(self.budget);
        let r = match e {
            Expr::Term(t) => eval_term(t, env, &self.config, &mut budget).map(Value::Set),
            Expr::Formula(f) => eval_bool(f, env, &self.config, &mut budget).map(Value::Bool),
        };
        (r, budget)
    }

    /// Parses and prints back in core syntax, or with short forms when `sugar` is set.
    pub fn expand(&self, src: &str, sugar: bool) -> Result<String, ParseError> {
        Ok(print_expr(&self.parse(src)?.value, sugar))
    }
}
