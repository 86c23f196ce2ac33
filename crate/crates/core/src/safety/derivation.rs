use std::fmt::Write;
use std::sync::Arc;

use crate::parser::print_formula;
use crate::syntax::{Formula, Term, Var, VarSet};

use super::TheoryConfig;

/// The clause applied at a derivation node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Atomic formulas are safe for the empty set.
    Atomic,
    /// `x = t`, `t = x`, `x ∈ t` (with `x ∉ Fv(t)`) and `x ∈ x` are safe for `{x}`.
    Generator,
    Negation,
    Disjunction,
    /// The right operand's variables avoid the left operand's free variables.
    Conjunction,
    /// The left operand's variables avoid the right operand's free variables.
    ConjunctionSwapped,
    Exists,
    /// `∀x(φ → ψ) ≻ ∅` when `φ ≻ {x}` and `ψ ≻ ∅`.
    BoundedForall,
    /// `φ → ψ ≻ ∅` when both sides are.
    Implication,
    TcForward,
    TcBackward,
    TcPair,
    TcTest,
    /// `x ⊆ t ≻ {x}` when `x ∉ Fv(t)`.
    SubsetGenerator,
    Separation,
    /// A comprehension admitted as a term because its body is safe for `∅`.
    SeparationTerm,
    Replacement,
    Powerset,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::Atomic => "atomic",
            Rule::Generator => "generator",
            Rule::Negation => "negation",
            Rule::Disjunction => "disjunction",
            Rule::Conjunction => "conjunction",
            Rule::ConjunctionSwapped => "conjunction-swapped",
            Rule::Exists => "exists",
            Rule::BoundedForall => "bounded-forall",
            Rule::Implication => "implication",
            Rule::TcForward => "tc-forward",
            Rule::TcBackward => "tc-backward",
            Rule::TcPair => "tc-pair",
            Rule::TcTest => "tc-test",
            Rule::SubsetGenerator => "subset-generator",
            Rule::Separation => "separation",
            Rule::SeparationTerm => "separation-term",
            Rule::Replacement => "replacement",
            Rule::Powerset => "powerset",
        }
    }

    /// Whether derivations using this clause can be compiled to a terminating plan.
    pub fn is_constructive(self) -> bool {
        !matches!(
            self,
            Rule::Separation | Rule::SeparationTerm | Rule::Replacement | Rule::Powerset
        )
    }
}

/// A derivation tree for `formula ≻ safe`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub formula: Formula,
    pub safe: VarSet,
    pub premises: Vec<Arc<Derivation>>,
    evaluable: bool,
}

impl Derivation {
    pub fn new(rule: Rule, formula: Formula, safe: VarSet, premises: Vec<Arc<Derivation>>) -> Self {
        let evaluable = rule.is_constructive() && premises.iter().all(|p| p.evaluable);
        Derivation { rule, formula, safe, premises, evaluable }
    }

    /// True iff every clause used is constructive.
    pub fn is_evaluable(&self) -> bool {
        self.evaluable
    }

    pub fn premise(&self, i: usize) -> &Derivation {
        &self.premises[i]
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    /// Every rule used, in pre-order.
    pub fn rules(&self) -> Vec<Rule> {
        let mut out = vec![self.rule];
        for p in &self.premises {
            out.extend(p.rules());
        }
        out
    }

    /// Re-validates every clause's side conditions.
    pub fn verify(&self, cfg: &TheoryConfig) -> Result<(), String> {
        let fail = |msg: &str| -> Result<(), String> {
            Err(format!(
                "{} at `{}` ≻ {}: {msg}",
                self.rule.id(),
                print_formula(&self.formula, false),
                self.safe
            ))
        };
        let fv = self.formula.free_vars();
        if self.rule != Rule::SeparationTerm && !self.safe.is_subset(&fv) {
            return fail("safe set is not contained in the free variables");
        }
        let n = self.premises.len();
        let prem = |i: usize| -> &Derivation { &self.premises[i] };
        let expect = |count: usize| -> Result<(), String> {
            if n == count {
                Ok(())
            } else {
                Err(format!("{}: expected {count} premises, found {n}", self.rule.id()))
            }
        };
        match self.rule {
            Rule::Atomic => {
                expect(0)?;
                if !self.formula.is_atomic() || !self.safe.is_empty() {
                    return fail("not an atomic formula with empty safe set");
                }
            }
            Rule::Generator => {
                expect(0)?;
                let ok = match self.safe.iter().collect::<Vec<_>>().as_slice() {
                    [v] => is_generator(&self.formula, v),
                    _ => false,
                };
                if !ok {
                    return fail("not a generator of its variable");
                }
            }
            Rule::SubsetGenerator => {
                expect(0)?;
                if !cfg.subseteq_atom {
                    return fail("subseteq pack disabled");
                }
                let ok = match (&self.formula, self.safe.iter().collect::<Vec<_>>().as_slice()) {
                    (Formula::Sub(Term::Var(x), t), [v]) => x == *v && !t.free_vars().contains(x),
                    _ => false,
                };
                if !ok {
                    return fail("not of the form x ⊆ t with x ∉ Fv(t)");
                }
            }
            Rule::Negation => {
                expect(1)?;
                match &self.formula {
                    Formula::Not(a) if prem(0).formula == **a => {}
                    _ => return fail("premise is not the negated formula"),
                }
                if !self.safe.is_empty() || !prem(0).safe.is_empty() {
                    return fail("negation only preserves ∅");
                }
            }
            Rule::Disjunction => {
                expect(2)?;
                match &self.formula {
                    Formula::Or(a, b) if prem(0).formula == **a && prem(1).formula == **b => {}
                    _ => return fail("premises do not match the disjuncts"),
                }
                if prem(0).safe != self.safe || prem(1).safe != self.safe {
                    return fail("both disjuncts must be safe for the same set");
                }
            }
            Rule::Conjunction | Rule::ConjunctionSwapped => {
                expect(2)?;
                let (a, b) = match &self.formula {
                    Formula::And(a, b) if prem(0).formula == **a && prem(1).formula == **b => (a, b),
                    _ => return fail("premises do not match the conjuncts"),
                };
                if prem(0).safe.union(&prem(1).safe) != self.safe {
                    return fail("safe set is not the union of the premises");
                }
                let ok = if self.rule == Rule::Conjunction {
                    prem(1).safe.is_disjoint(&a.free_vars())
                } else {
                    cfg.conjunction_symmetric && prem(0).safe.is_disjoint(&b.free_vars())
                };
                if !ok {
                    return fail("variable disjointness condition violated");
                }
            }
            Rule::Exists => {
                expect(1)?;
                match &self.formula {
                    Formula::Exists(y, a) if prem(0).formula == **a => {
                        if !prem(0).safe.contains(y) || prem(0).safe.without(y) != self.safe {
                            return fail("bound variable must be in the premise's safe set");
                        }
                    }
                    _ => return fail("premise is not the quantified body"),
                }
            }
            Rule::BoundedForall => {
                expect(2)?;
                match &self.formula {
                    Formula::Forall(x, body) => match &**body {
                        Formula::Implies(p, q)
                            if prem(0).formula == **p
                                && prem(1).formula == **q
                                && prem(0).safe == VarSet::singleton(x.clone())
                                && prem(1).safe.is_empty()
                                && self.safe.is_empty() => {}
                        _ => return fail("expected ∀x(φ → ψ) with φ ≻ {x} and ψ ≻ ∅"),
                    },
                    _ => return fail("not a universal formula"),
                }
            }
            Rule::Implication => {
                expect(2)?;
                match &self.formula {
                    Formula::Implies(p, q)
                        if prem(0).formula == **p
                            && prem(1).formula == **q
                            && prem(0).safe.is_empty()
                            && prem(1).safe.is_empty()
                            && self.safe.is_empty() => {}
                    _ => return fail("expected φ → ψ with both sides safe for ∅"),
                }
            }
            Rule::TcForward | Rule::TcBackward | Rule::TcPair | Rule::TcTest => {
                expect(1)?;
                if !cfg.tc {
                    return fail("tc pack disabled");
                }
                let Formula::Tc(c) = &self.formula else {
                    return fail("not a TC formula");
                };
                if prem(0).formula != *c.body {
                    return fail("premise is not the TC body");
                }
                let ps = &prem(0).safe;
                let params = c.body.free_vars().without(&c.x).without(&c.y);
                let arg_ok = |arg: &Term, other: &Term, v: &Var| {
                    arg.as_var() == Some(v) && !other.free_vars().contains(v) && !params.contains(v)
                };
                let ok = match self.rule {
                    Rule::TcTest => self.safe.is_empty() && (ps.contains(&c.x) || ps.contains(&c.y)),
                    Rule::TcForward => match c.to.as_var() {
                        Some(v) => {
                            ps.contains(&c.y)
                                && self.safe == VarSet::singleton(v.clone())
                                && arg_ok(&c.to, &c.from, v)
                        }
                        None => false,
                    },
                    Rule::TcBackward => match c.from.as_var() {
                        Some(u) => {
                            ps.contains(&c.x)
                                && self.safe == VarSet::singleton(u.clone())
                                && arg_ok(&c.from, &c.to, u)
                        }
                        None => false,
                    },
                    _ => match (c.from.as_var(), c.to.as_var()) {
                        (Some(u), Some(v)) => {
                            u != v
                                && ps.contains(&c.x)
                                && ps.contains(&c.y)
                                && !params.contains(u)
                                && !params.contains(v)
                                && self.safe == [u.clone(), v.clone()].into_iter().collect()
                        }
                        _ => false,
                    },
                };
                if !ok {
                    return fail("TC side conditions violated");
                }
            }
            Rule::Separation => {
                expect(0)?;
                if !cfg.separation || !self.safe.is_empty() {
                    return fail("separation only yields ∅ and must be enabled");
                }
            }
            Rule::SeparationTerm => {
                expect(1)?;
                if !cfg.separation
                    || prem(0).formula != self.formula
                    || !prem(0).safe.is_empty()
                    || self.safe.len() != 1
                {
                    return fail("separation-term needs the body safe for ∅");
                }
            }
            Rule::Replacement => {
                expect(1)?;
                if !cfg.replacement {
                    return fail("replacement pack disabled");
                }
                match replacement_parts(&self.formula) {
                    Some((phi, yr, psi)) => {
                        if prem(0).formula != *psi
                            || prem(0).safe != self.safe
                            || !self.safe.is_disjoint(&phi.free_vars())
                            || self.safe.contains(yr)
                        {
                            return fail("replacement side conditions violated");
                        }
                    }
                    None => return fail("not of the form ∃yφ ∧ ∀y(φ → ψ)"),
                }
            }
            Rule::Powerset => {
                expect(1)?;
                if !cfg.powerset {
                    return fail("powerset pack disabled");
                }
                match powerset_parts(&self.formula) {
                    Some((y, x, phi)) => {
                        let expected = prem(0).safe.without(y).with(x.clone());
                        if prem(0).formula != *phi
                            || !prem(0).safe.contains(y)
                            || phi.free_vars().contains(x)
                            || expected != self.safe
                        {
                            return fail("powerset side conditions violated");
                        }
                    }
                    None => return fail("not of the form ∀y(y ∈ x → φ)"),
                }
            }
        }
        for p in &self.premises {
            p.verify(cfg)?;
        }
        Ok(())
    }

    /// Indented clause-by-clause rendering.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        self.explain_into(0, &mut out);
        out
    }

    fn explain_into(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        let _ = writeln!(
            out,
            "{pad}{} ≻ {}   [{}]",
            print_formula(&self.formula, false),
            self.safe,
            self.rule.id()
        );
        if let Some(note) = self.note() {
            let _ = writeln!(out, "{pad}  -- {note}");
        }
        for p in &self.premises {
            p.explain_into(depth + 1, out);
        }
    }

    fn note(&self) -> Option<String> {
        match (self.rule, &self.formula) {
            (Rule::Generator, _) => {
                let v = self.safe.iter().next()?;
                Some(format!("{v} is generated by the atom"))
            }
            (Rule::Conjunction, Formula::And(a, _)) => Some(format!(
                "left supplies {}, right supplies {}; {} ∩ Fv(left) = ∅ (Fv(left) = {})",
                self.premises[0].safe,
                self.premises[1].safe,
                self.premises[1].safe,
                a.free_vars()
            )),
            (Rule::ConjunctionSwapped, Formula::And(_, b)) => Some(format!(
                "left supplies {}, right supplies {}; {} ∩ Fv(right) = ∅ (Fv(right) = {})",
                self.premises[0].safe,
                self.premises[1].safe,
                self.premises[0].safe,
                b.free_vars()
            )),
            (Rule::Exists, Formula::Exists(y, _)) => {
                Some(format!("{y} ∈ {} is projected away", self.premises[0].safe))
            }
            (Rule::TcForward | Rule::TcBackward | Rule::TcPair | Rule::TcTest, Formula::Tc(c)) => {
                let ps = &self.premises[0].safe;
                let dir = match self.rule {
                    Rule::TcForward => "forward reachability",
                    Rule::TcBackward => "backward reachability",
                    Rule::TcPair => "closure of the enumerated step relation",
                    _ => "membership test",
                };
                Some(format!(
                    "{{{}, {}}} ∩ X ≠ ∅ with X = {ps}; {dir}",
                    c.x, c.y
                ))
            }
            (Rule::SeparationTerm, _) => {
                Some("admitted as a term by the separation pack; not evaluable".into())
            }
            (Rule::Separation, _) => Some("every formula is safe for ∅ under separation".into()),
            _ => None,
        }
    }
}

/// `x = t`, `t = x`, `x ∈ t` with `x ∉ Fv(t)`, or `x ∈ x`.
pub(crate) fn is_generator(f: &Formula, v: &Var) -> bool {
    is_generator_by(f, v, |t| !t.free_vars().contains(v))
}

/// As [`is_generator`], with `fresh_in(t)` deciding `v ∉ Fv(t)`.
pub(crate) fn is_generator_by(f: &Formula, v: &Var, mut fresh_in: impl FnMut(&Term) -> bool) -> bool {
    match f {
        Formula::Mem(Term::Var(x), t) if x == v => t.as_var() == Some(v) || fresh_in(t),
        Formula::Eq(Term::Var(x), t) if x == v && fresh_in(t) => true,
        Formula::Eq(t, Term::Var(x)) if x == v && fresh_in(t) => true,
        _ => false,
    }
}

/// Splits `∃yφ ∧ ∀y'(φ' → ψ)` where the two quantified `φ` occurrences are
/// α-equivalent. Returns `(φ, y', ψ)`.
pub(crate) fn replacement_parts(f: &Formula) -> Option<(&Formula, &Var, &Formula)> {
    let Formula::And(l, r) = f else { return None };
    let Formula::Exists(y, phi) = &**l else { return None };
    let Formula::Forall(yr, body) = &**r else { return None };
    let Formula::Implies(phi2, psi) = &**body else { return None };
    let lhs = Formula::Exists(y.clone(), phi.clone());
    let rhs = Formula::Exists(yr.clone(), phi2.clone());
    lhs.alpha_eq(&rhs).then_some((&**phi, yr, &**psi))
}

/// Splits `∀y(y ∈ x → φ)` with `x ≠ y`. Returns `(y, x, φ)`.
pub(crate) fn powerset_parts(f: &Formula) -> Option<(&Var, &Var, &Formula)> {
    let Formula::Forall(y, body) = f else { return None };
    let Formula::Implies(guard, phi) = &**body else { return None };
    match &**guard {
        Formula::Mem(Term::Var(y2), Term::Var(x)) if y2 == y && x != y => Some((y, x, &**phi)),
        _ => None,
    }
}
