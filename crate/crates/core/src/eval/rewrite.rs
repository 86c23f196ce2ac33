//! β/η simplification.
//!
//! - β: `t ∈ {x | φ}` rewrites to `φ[x := t]`.
//! - η: `{x | x ∈ t}` rewrites to `t` when `x ∉ Fv(t)`.
//!
//! Rewriting need not terminate (`∅ ∈ ∅` β-reduces to itself), so
//! [`simplify`] takes a fuel bound and skips redexes whose contraction
//! reproduces them up to α-equivalence.

use std::sync::Arc;

use crate::syntax::{Closure, Comprehension, Expr, Formula, Term};

/// Result of [`simplify`].
#[derive(Clone, Debug)]
pub struct Simplified {
    pub expr: Expr,
    /// Contractions performed.
    pub steps: usize,
    /// True when the fuel ran out before a normal form was reached.
    pub out_of_fuel: bool,
}

/// Contracts redexes leftmost-outermost, at most `fuel` times.
pub fn simplify(e: &Expr, fuel: usize) -> Simplified {
    let mut cur = e.clone();
    for steps in 0..fuel {
        match beta_eta(&cur) {
            Some(next) => cur = next,
            None => return Simplified { expr: cur, steps, out_of_fuel: false },
        }
    }
    let out_of_fuel = beta_eta(&cur).is_some();
    Simplified { expr: cur, steps: fuel, out_of_fuel }
}

/// One leftmost-outermost contraction, or `None` in normal form.
pub fn beta_eta(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Term(t) => step_term(t).map(Expr::Term),
        Expr::Formula(f) => step_formula(f).map(Expr::Formula),
    }
}

fn beta(f: &Formula) -> Option<Formula> {
    let Formula::Mem(t, Term::Compr(c)) = f else { return None };
    let out = c.body.substitute(&c.binder, t);
    (!out.alpha_eq(f)).then_some(out)
}

fn eta(t: &Term) -> Option<Term> {
    let Term::Compr(c) = t else { return None };
    match &*c.body {
        Formula::Mem(Term::Var(x), s) if *x == c.binder && !s.free_vars().contains(x) => Some(s.clone()),
        _ => None,
    }
}

fn step_term(t: &Term) -> Option<Term> {
    if let Some(r) = eta(t) {
        return Some(r);
    }
    match t {
        Term::Compr(c) => step_formula(&c.body).map(|b| {
            Term::Compr(Comprehension { binder: c.binder.clone(), body: Arc::new(b), span: c.span.clone() })
        }),
        _ => None,
    }
}

fn step_formula(f: &Formula) -> Option<Formula> {
    if let Some(r) = beta(f) {
        return Some(r);
    }
    let pair = |a: &Term, b: &Term, mk: fn(Term, Term) -> Formula| {
        step_term(a)
            .map(|a2| mk(a2, b.clone()))
            .or_else(|| step_term(b).map(|b2| mk(a.clone(), b2)))
    };
    let bin = |a: &Arc<Formula>, b: &Arc<Formula>, mk: fn(Arc<Formula>, Arc<Formula>) -> Formula| {
        step_formula(a)
            .map(|a2| mk(Arc::new(a2), b.clone()))
            .or_else(|| step_formula(b).map(|b2| mk(a.clone(), Arc::new(b2))))
    };
    match f {
        Formula::Mem(a, b) => pair(a, b, Formula::Mem),
        Formula::Eq(a, b) => pair(a, b, Formula::Eq),
        Formula::Sub(a, b) => pair(a, b, Formula::Sub),
        Formula::Not(a) => step_formula(a).map(Formula::not),
        Formula::And(a, b) => bin(a, b, Formula::And),
        Formula::Or(a, b) => bin(a, b, Formula::Or),
        Formula::Implies(a, b) => bin(a, b, Formula::Implies),
        Formula::Exists(v, a) => step_formula(a).map(|a2| Formula::Exists(v.clone(), Arc::new(a2))),
        Formula::Forall(v, a) => step_formula(a).map(|a2| Formula::Forall(v.clone(), Arc::new(a2))),
        Formula::Tc(c) => {
            let rebuild = |body: Arc<Formula>, from: Term, to: Term| {
                Formula::Tc(Arc::new(Closure { x: c.x.clone(), y: c.y.clone(), body, from, to }))
            };
            step_formula(&c.body)
                .map(|b| rebuild(Arc::new(b), c.from.clone(), c.to.clone()))
                .or_else(|| step_term(&c.from).map(|s| rebuild(c.body.clone(), s, c.to.clone())))
                .or_else(|| step_term(&c.to).map(|s| rebuild(c.body.clone(), c.from.clone(), s)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, print_expr, Definitions, ParseOptions};

    fn parse(s: &str) -> Expr {
        parse_expr(s, &Definitions::standard(), &ParseOptions::default()).unwrap().value
    }

    #[test]
    fn beta_and_eta() {
        let e = parse("a in {x | x in s & x = b}");
        let out = simplify(&e, 10);
        assert_eq!(print_expr(&out.expr, false), "a in s & a = b");
        let e = parse("{x | x in s}");
        assert_eq!(print_expr(&simplify(&e, 10).expr, false), "s");
    }

    #[test]
    fn self_reproducing_redex_is_skipped() {
        let e = parse("0 in 0");
        let out = simplify(&e, 100);
        assert!(!out.out_of_fuel);
        assert_eq!(out.steps, 0);
    }
}
