use std::fmt::Write;
use std::sync::Arc;

use crate::parser::{print_formula, print_term};
use crate::safety::{Derivation, Rule};
use crate::syntax::{Closure, Formula, Term, Var};

use super::EvalError;

/// A query plan computing `{⟨X⟩ | φ}` for a derivation of `φ ≻ X`.
///
/// Output rows list the values of `cols`, which are the variables of `X` in
/// sorted order. A plan for `X = ∅` yields either no row (false) or the
/// single empty row (true).
#[derive(Clone, Debug)]
pub struct Plan {
    pub cols: Vec<Var>,
    pub node: Node,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcMode {
    /// Decide reachability between two given endpoints, searching forward.
    TestForward,
    /// Decide reachability, searching backward from the target.
    TestBackward,
    /// Everything reachable from the start.
    Forward,
    /// Everything that reaches the target.
    Backward,
    /// All connected pairs.
    Pair,
}

#[derive(Clone, Debug)]
pub enum Node {
    /// Evaluate an atomic formula.
    Test(Formula),
    /// `x = t` or `t = x`.
    Singleton { var: Var, term: Term },
    /// `x ∈ t`.
    Elements { var: Var, term: Term },
    /// `x ∈ x` never holds.
    EmptyExt,
    /// `x ⊆ t`.
    SubsetEnum { var: Var, term: Term },
    Negate(Box<Plan>),
    Implication(Box<Plan>, Box<Plan>),
    Union(Box<Plan>, Box<Plan>),
    /// Rows of `first`, each extended by the rows of `second` run under its bindings.
    DependentJoin { first: Box<Plan>, second: Box<Plan> },
    Project { inner: Box<Plan>, var: Var },
    /// `∀x(φ → ψ)`: `check` holds for every `x` produced by `range`.
    ForallTest { var: Var, range: Box<Plan>, check: Box<Plan> },
    TcFixpoint { closure: Arc<Closure>, mode: TcMode, step: Box<Plan> },
}

/// Compiles a constructive derivation.
pub fn compile(d: &Derivation) -> Result<Plan, EvalError> {
    if !d.is_evaluable() {
        let bad = d
            .rules()
            .into_iter()
            .find(|r| !r.is_constructive())
            .map(|r| r.id())
            .unwrap_or("unknown");
        return Err(EvalError::not_evaluable(format!(
            "the derivation of `{}` ≻ {} uses the static-only clause `{bad}`",
            print_formula(&d.formula, false),
            d.safe
        )));
    }
    let cols = d.safe.to_vec();
    let sub = |i: usize| compile(d.premise(i)).map(Box::new);
    let node = match d.rule {
        Rule::Atomic => Node::Test(d.formula.clone()),
        Rule::Generator => {
            let v = cols[0].clone();
            match &d.formula {
                Formula::Mem(Term::Var(a), Term::Var(b)) if *a == v && *b == v => Node::EmptyExt,
                Formula::Mem(Term::Var(a), t) if *a == v => Node::Elements { var: v, term: t.clone() },
                Formula::Eq(Term::Var(a), t) if *a == v && !t.free_vars().contains(&v) => {
                    Node::Singleton { var: v, term: t.clone() }
                }
                Formula::Eq(t, Term::Var(b)) if *b == v => Node::Singleton { var: v, term: t.clone() },
                f => {
                    return Err(EvalError::not_evaluable(format!(
                        "`{}` is not a generator",
                        print_formula(f, false)
                    )))
                }
            }
        }
        Rule::SubsetGenerator => match &d.formula {
            Formula::Sub(Term::Var(a), t) => Node::SubsetEnum { var: a.clone(), term: t.clone() },
            f => {
                return Err(EvalError::not_evaluable(format!("`{}` is not a ⊆ generator", print_formula(f, false))))
            }
        },
        Rule::Negation => Node::Negate(sub(0)?),
        Rule::Implication => Node::Implication(sub(0)?, sub(1)?),
        Rule::Disjunction => Node::Union(sub(0)?, sub(1)?),
        Rule::Conjunction => Node::DependentJoin { first: sub(0)?, second: sub(1)? },
        Rule::ConjunctionSwapped => Node::DependentJoin { first: sub(1)?, second: sub(0)? },
        Rule::Exists => match &d.formula {
            Formula::Exists(y, _) => Node::Project { inner: sub(0)?, var: y.clone() },
            _ => unreachable!("exists rule on a non-existential"),
        },
        Rule::BoundedForall => match &d.formula {
            Formula::Forall(v, _) => Node::ForallTest { var: v.clone(), range: sub(0)?, check: sub(1)? },
            _ => unreachable!("bounded-forall rule on a non-universal"),
        },
        Rule::TcForward | Rule::TcBackward | Rule::TcPair | Rule::TcTest => {
            let Formula::Tc(c) = &d.formula else { unreachable!("tc rule on a non-closure") };
            let step = d.premise(0);
            let mode = match d.rule {
                Rule::TcForward => TcMode::Forward,
                Rule::TcBackward => TcMode::Backward,
                Rule::TcPair => TcMode::Pair,
                _ if step.safe.contains(&c.y) => TcMode::TestForward,
                _ => TcMode::TestBackward,
            };
            Node::TcFixpoint { closure: c.clone(), mode, step: sub(0)? }
        }
        Rule::Separation | Rule::SeparationTerm | Rule::Replacement | Rule::Powerset => {
            unreachable!("non-constructive rules are rejected above")
        }
    };
    Ok(Plan { cols, node })
}

impl Plan {
    /// An indented outline of the plan.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        self.explain_into(0, &mut out);
        out
    }

    fn explain_into(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        let cols: Vec<&str> = self.cols.iter().map(Var::as_str).collect();
        let head = match &self.node {
            Node::Test(f) => format!("test {}", print_formula(f, true)),
            Node::Singleton { var, term } => format!("singleton {var} := {}", print_term(term, true)),
            Node::Elements { var, term } => format!("elements {var} ∈ {}", print_term(term, true)),
            Node::EmptyExt => "empty".into(),
            Node::SubsetEnum { var, term } => format!("subsets {var} ⊆ {}", print_term(term, true)),
            Node::Negate(_) => "negate".into(),
            Node::Implication(..) => "implication".into(),
            Node::Union(..) => "union".into(),
            Node::DependentJoin { .. } => "dependent-join".into(),
            Node::Project { var, .. } => format!("project away {var}"),
            Node::ForallTest { var, .. } => format!("forall-test over {var}"),
            Node::TcFixpoint { mode, .. } => format!("tc-fixpoint {mode:?}"),
        };
        let _ = writeln!(out, "{pad}{head}  -> [{}]", cols.join(", "));
        match &self.node {
            Node::Negate(a) | Node::Project { inner: a, .. } | Node::TcFixpoint { step: a, .. } => {
                a.explain_into(depth + 1, out)
            }
            Node::Implication(a, b)
            | Node::Union(a, b)
            | Node::DependentJoin { first: a, second: b }
            | Node::ForallTest { range: a, check: b, .. } => {
                a.explain_into(depth + 1, out);
                b.explain_into(depth + 1, out);
            }
            _ => {}
        }
    }
}
