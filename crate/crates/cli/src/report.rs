//! JSON report fragments. Objects serialize with sorted keys.

use rudiset::parser::{print_formula, print_term, Obligation};
use rudiset::safety::{Blame, Derivation, SafetyFamily, Violation};
use rudiset::syntax::SourceSpan;
use rudiset::{EvalError, ParseError, VarSet};
use serde_json::{json, Value};

pub const SCHEMA: u64 = 1;

pub fn render(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

pub fn varset(x: &VarSet) -> Value {
    Value::Array(x.iter().map(|v| Value::String(v.as_str().to_string())).collect())
}

pub fn span(s: Option<&SourceSpan>) -> Value {
    s.map(|s| Value::String(s.to_string())).unwrap_or(Value::Null)
}

pub fn family(f: &SafetyFamily) -> Value {
    Value::Array(f.maximal().iter().map(varset).collect())
}

pub fn parse_error(e: &ParseError) -> Value {
    json!({ "kind": e.kind(), "message": e.message(), "span": e.span().to_string() })
}

pub fn eval_error(e: &EvalError) -> Value {
    match e {
        EvalError::NotEvaluable { reason } => json!({ "kind": "not_evaluable", "message": reason }),
        EvalError::BudgetExceeded { consumed, limit } => {
            json!({ "kind": "budget_exceeded", "message": e.to_string(), "consumed": consumed, "limit": limit })
        }
        EvalError::UnboundVariable(v) => json!({ "kind": "unbound_variable", "message": e.to_string(), "variable": v.as_str() }),
        EvalError::Unsupported(_) => json!({ "kind": "unsupported", "message": e.to_string() }),
    }
}

pub fn blame(b: &Blame, sugar: bool) -> Value {
    json!({ "formula": print_formula(&b.formula, sugar), "safe": varset(&b.safe), "reason": b.reason })
}

pub fn violation(v: &Violation, sugar: bool) -> Value {
    json!({
        "comprehension": print_term(&v.comprehension, sugar),
        "span": span(v.span.as_ref()),
        "reason": v.reason,
        "blame": blame(&v.blame, sugar),
    })
}

pub fn obligation(o: &Obligation, holds: bool, sugar: bool) -> Value {
    json!({
        "formula": print_formula(&o.formula, sugar),
        "safe": varset(&o.safe),
        "origin": o.origin,
        "span": span(o.span.as_ref()),
        "holds": holds,
    })
}

pub fn derivation(d: &Derivation, sugar: bool) -> Value {
    json!({
        "rule": d.rule.id(),
        "formula": print_formula(&d.formula, sugar),
        "safe": varset(&d.safe),
        "evaluable": d.is_evaluable(),
        "premises": d.premises.iter().map(|p| derivation(p, sugar)).collect::<Vec<_>>(),
    })
}

/// Rule counts and size over a set of derivations.
pub fn derivation_summary<'a>(ds: impl IntoIterator<Item = &'a Derivation>) -> Value {
    let mut rules = std::collections::BTreeMap::<&'static str, u64>::new();
    let (mut n, mut size) = (0u64, 0u64);
    for d in ds {
        n += 1;
        size += d.size() as u64;
        for r in d.rules() {
            *rules.entry(r.id()).or_default() += 1;
        }
    }
    json!({ "derivations": n, "nodes": size, "rules": rules })
}
